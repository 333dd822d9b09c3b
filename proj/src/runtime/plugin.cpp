#include "xrsim/runtime/plugin.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace xrsim {

namespace {

double parse_number(std::string_view s, std::string_view whole) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("cost model: cannot parse '" + std::string(whole) + "'");
    return v;
}

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

CostModel CostModel::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        const double v = parse_number(text, text);
        if (v < 0) throw ConfigError("cost model: negative cost");
        return constant(v);
    }
    const auto kind = text.substr(0, colon);
    const auto args = text.substr(colon + 1);
    const auto comma = args.find(',');
    const double a = parse_number(args.substr(0, comma), text);
    const double b = comma == std::string_view::npos ? 0.0 : parse_number(args.substr(comma + 1), text);
    CostModel m;
    if (kind == "constant") {
        m = constant(a);
    } else if (kind == "normal") {
        m = normal(a, b);
    } else if (kind == "lognormal") {
        if (a <= 0) throw ConfigError("cost model: lognormal median must be positive");
        m = lognormal(a, b);
    } else {
        throw ConfigError("cost model: unknown kind '" + std::string(kind) + "'");
    }
    if (m.a < 0 || m.b < 0) throw ConfigError("cost model: negative parameter in '" + std::string(text) + "'");
    return m;
}

std::string CostModel::to_string() const {
    switch (kind) {
        case Kind::constant: return "constant:" + fmt_double(a);
        case Kind::normal: return "normal:" + fmt_double(a) + "," + fmt_double(b);
        case Kind::lognormal: return "lognormal:" + fmt_double(a) + "," + fmt_double(b);
    }
    return {};
}

Duration CostModel::sample(std::mt19937_64& rng) const {
    double ms = a;
    switch (kind) {
        case Kind::constant: break;
        case Kind::normal: ms = std::normal_distribution<double>(a, b)(rng); break;
        case Kind::lognormal: ms = std::lognormal_distribution<double>(std::log(a), b)(rng); break;
    }
    return Duration::millis(std::max(0.0, ms));
}

InvocationContext::InvocationContext(Switchboard& sb, const PluginDescriptor& desc, std::uint64_t seq,
                                     Timestamp start, Duration planned_cost, std::mt19937_64& rng,
                                     const AnyEvent* trigger, bool deferred)
    : sb_(sb), desc_(desc), seq_(seq), start_(start), cost_(planned_cost), rng_(rng), trigger_(trigger),
      deferred_(deferred) {}

void InvocationContext::set_cost(Duration d) {
    if (d.ns < 0) throw ConfigError("plugin '" + desc_.name + "': negative cost");
    cost_ = d;
}

void InvocationContext::publish_erased(const std::shared_ptr<detail::TopicState>& topic,
                                       std::shared_ptr<const void> value, Timestamp ts) {
    if (std::find(desc_.writes.begin(), desc_.writes.end(), topic->name) == desc_.writes.end())
        throw PermissionError("plugin '" + desc_.name + "' does not declare a write to '" + topic->name + "'");
    if (deferred_) {
        pending_.push_back({topic, std::move(value), ts});
    } else {
        sb_.publish_erased(*topic, desc_.name, std::move(value), ts);
    }
}

}  // namespace xrsim
