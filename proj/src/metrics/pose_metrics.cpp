#include "xrsim/metrics/pose_metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

void check_trajectory(const Trajectory& t, const char* what) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i - 1].ts < t[i].ts)) throw InputError(std::string(what) + ": timestamps must strictly increase");
}

namespace {

std::size_t nearest(const Trajectory& t, Timestamp ts) {
    auto it = std::lower_bound(t.begin(), t.end(), ts, [](const PoseSample& s, Timestamp v) { return s.ts < v; });
    if (it == t.end()) return t.size() - 1;
    const auto j = static_cast<std::size_t>(it - t.begin());
    if (j == 0) return 0;
    return (ts - t[j - 1].ts) <= (t[j].ts - ts) ? j - 1 : j;
}

Duration abs_diff(Timestamp a, Timestamp b) { return a < b ? b - a : a - b; }

}  // namespace

Association associate(const Trajectory& est, const Trajectory& gt, Duration max_gap) {
    check_trajectory(est, "estimate");
    check_trajectory(gt, "ground truth");
    Association a;
    if (gt.empty()) return a;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const std::size_t j = nearest(gt, est[i].ts);
        if (abs_diff(est[i].ts, gt[j].ts) <= max_gap) a.pairs.emplace_back(i, j);
    }
    return a;
}

Pose Alignment::apply(const Pose& p) const {
    Pose out;
    out.position = scale * (rotation * p.position) + translation;
    out.orientation = (Quat(rotation) * p.orientation).normalized();
    return out;
}

Alignment align_trajectories(const Trajectory& est, const Trajectory& gt, bool with_scale, Duration max_gap) {
    const auto assoc = associate(est, gt, max_gap);
    const std::size_t n = assoc.pairs.size();
    if (n < 3) throw InputError("align: fewer than 3 associated pose pairs");

    Eigen::Matrix3Xd X(3, static_cast<Eigen::Index>(n));
    Eigen::Matrix3Xd Y(3, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        X.col(static_cast<Eigen::Index>(k)) = est[assoc.pairs[k].first].pose.position;
        Y.col(static_cast<Eigen::Index>(k)) = gt[assoc.pairs[k].second].pose.position;
    }
    const Vec3 mx = X.rowwise().mean();
    const Vec3 my = Y.rowwise().mean();
    const Eigen::Matrix3Xd Xc = X.colwise() - mx;
    const Eigen::Matrix3Xd Yc = Y.colwise() - my;
    const double nn = static_cast<double>(n);
    const Mat3 cov = Yc * Xc.transpose() / nn;

    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 S = Mat3::Identity();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) S(2, 2) = -1;

    Alignment a;
    a.pairs = n;
    a.rotation = svd.matrixU() * S * svd.matrixV().transpose();
    const double var_x = Xc.squaredNorm() / nn;
    if (with_scale) {
        if (var_x <= 0) throw InputError("align: estimate has zero spread");
        a.scale = (svd.singularValues().asDiagonal() * S).trace() / var_x;
    }
    a.translation = my - a.scale * a.rotation * mx;

    // rank of the estimate's spread: collinear (or coincident) points leave a rotation free
    Eigen::JacobiSVD<Eigen::Matrix3Xd> spread(Xc);
    const auto sv = spread.singularValues();
    a.degenerate = sv[0] <= 0 || sv[1] <= 1e-9 * sv[0];
    return a;
}

Trajectory apply_alignment(const Alignment& a, const Trajectory& est) {
    Trajectory out = est;
    for (auto& s : out) {
        s.pose = a.apply(s.pose);
        s.linear_velocity = a.scale * (a.rotation * s.linear_velocity);
    }
    return out;
}

AteResult ate(const Trajectory& est, const Trajectory& gt, Duration max_gap) {
    const auto assoc = associate(est, gt, max_gap);
    AteResult r;
    r.pairs = assoc.pairs.size();
    if (r.pairs == 0) throw InputError("ate: no associated pose pairs");
    double st = 0.0, sr = 0.0;
    for (auto [i, j] : assoc.pairs) {
        st += (est[i].pose.position - gt[j].pose.position).squaredNorm();
        const double ang = angular_distance(est[i].pose.orientation, gt[j].pose.orientation);
        sr += ang * ang;
    }
    r.translation_m = std::sqrt(st / static_cast<double>(r.pairs));
    r.rotation_deg = rad_to_deg(std::sqrt(sr / static_cast<double>(r.pairs)));
    return r;
}

ErrorStats summarize(std::vector<double> v) {
    ErrorStats s;
    if (v.empty()) return s;
    const double n = static_cast<double>(v.size());
    double sum = 0.0, sq = 0.0;
    for (double x : v) {
        sum += x;
        sq += x * x;
        s.max = std::max(s.max, x);
    }
    s.mean = sum / n;
    s.rmse = std::sqrt(sq / n);
    s.std = std::sqrt(std::max(0.0, sq / n - s.mean * s.mean));
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    s.median = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    return s;
}

RpeResult rpe(const Trajectory& est, const Trajectory& gt, Duration delta, Duration max_gap) {
    if (delta.ns <= 0) throw InputError("rpe: delta must be positive");
    const auto assoc = associate(est, gt, max_gap);
    if (assoc.pairs.size() < 2) throw InputError("rpe: fewer than 2 associated pose pairs");
    const Timestamp first = est[assoc.pairs.front().first].ts;
    const Timestamp last = est[assoc.pairs.back().first].ts;
    if (delta > last - first) throw InputError("rpe: delta exceeds the trajectory span");

    // index pairs by estimate timestamp for the second lookup
    Trajectory keyed;
    keyed.reserve(assoc.pairs.size());
    for (auto [i, j] : assoc.pairs) keyed.push_back(est[i]);

    RpeResult r;
    for (std::size_t a = 0; a < assoc.pairs.size(); ++a) {
        const Timestamp target = keyed[a].ts + delta;
        if (target > last) break;
        const std::size_t b = nearest(keyed, target);
        if (b <= a || abs_diff(keyed[b].ts, target) > max_gap) continue;
        const auto [ei, gi] = assoc.pairs[a];
        const auto [ej, gj] = assoc.pairs[b];
        const Quat& qEi = est[ei].pose.orientation;
        const Quat& qGi = gt[gi].pose.orientation;
        const Quat dE = qEi.conjugate() * est[ej].pose.orientation;
        const Vec3 tE = qEi.conjugate() * (est[ej].pose.position - est[ei].pose.position);
        const Quat dG = qGi.conjugate() * gt[gj].pose.orientation;
        const Vec3 tG = qGi.conjugate() * (gt[gj].pose.position - gt[gi].pose.position);
        // dG^-1 * dE
        const Vec3 terr = dG.conjugate() * (tE - tG);
        r.translation_m.push_back(terr.norm());
        r.rotation_deg.push_back(rad_to_deg(angular_distance(dG, dE)));
    }
    if (r.translation_m.empty()) throw InputError("rpe: no pose pairs separated by delta");
    r.translation = summarize(r.translation_m);
    r.rotation = summarize(r.rotation_deg);
    return r;
}

}  // namespace xrsim
