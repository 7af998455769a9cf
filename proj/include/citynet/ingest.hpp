#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "citynet/dataset.hpp"
#include "citynet/error.hpp"
#include "citynet/graph.hpp"

namespace citynet {

namespace detail {

/// Splits one CSV record; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv(std::string_view line, std::size_t lineno) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", lineno);
    return fields;
}

/// Reads a header-led CSV stream, handing each data record to fn(fields, lineno).
template <typename Fn>
void read_csv(std::istream& in, std::size_t columns, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            if (split_csv(line, lineno).size() != columns) {
                throw ParseError("header must have " + std::to_string(columns) + " columns", lineno);
            }
            header = false;
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv(line, lineno);
        if (fields.size() != columns) {
            throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()), lineno);
        }
        for (const auto& f : fields) {
            if (f.empty()) throw ParseError("empty field", lineno);
        }
        fn(fields, lineno);
    }
    if (header) throw ParseError("missing header row", 0);
}

template <typename T>
T parse_number(const std::string& text, std::string_view what, std::size_t lineno) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("invalid " + std::string(what) + " '" + text + "'", lineno);
    }
    return value;
}

}  // namespace detail

/// `user_id,venue_id,unix_timestamp` with a header row; records in file order.
inline std::vector<CheckIn> parse_checkins(std::istream& in) {
    std::vector<CheckIn> out;
    detail::read_csv(in, 3, [&](std::vector<std::string>& f, std::size_t lineno) {
        const auto t = detail::parse_number<std::int64_t>(f[2], "timestamp", lineno);
        if (t < 0) throw ParseError("negative timestamp", lineno);
        out.push_back({std::move(f[0]), std::move(f[1]), t});
    });
    return out;
}

/// `venue_id,name,lat,lon,category` with a header row.
inline std::map<std::string, Venue> parse_venues(std::istream& in) {
    std::map<std::string, Venue> out;
    detail::read_csv(in, 5, [&](std::vector<std::string>& f, std::size_t lineno) {
        Venue v;
        v.id = f[0];
        v.name = f[1];
        v.position = {detail::parse_number<double>(f[2], "latitude", lineno),
                      detail::parse_number<double>(f[3], "longitude", lineno)};
        if (v.position.lat < -90.0 || v.position.lat > 90.0) throw ParseError("latitude out of range [-90, 90]", lineno);
        if (v.position.lon < -180.0 || v.position.lon > 180.0) throw ParseError("longitude out of range [-180, 180]", lineno);
        auto cat = parse_category(f[4]);
        if (!cat) throw ParseError("unknown category '" + f[4] + "'", lineno);
        v.category = *cat;
        if (!out.emplace(v.id, v).second) throw ParseError("duplicate venue id '" + v.id + "'", lineno);
    });
    return out;
}

/// `follower_id,followee_id` with a header row; duplicates collapse.
inline FollowSet parse_follows(std::istream& in) {
    FollowSet out;
    detail::read_csv(in, 2, [&](std::vector<std::string>& f, std::size_t) { out.emplace(std::move(f[0]), std::move(f[1])); });
    return out;
}

enum class NodePolicy {
    /// Only users with at least one tie.
    Connected,
    /// Every user in the dataset, isolated or not.
    AllUsers,
};

/// Empirical city network: u–v is a tie iff both follow each other and their
/// visited venue sets intersect.
inline SocialGraph build_city_network(const CityDataset& d, NodePolicy policy = NodePolicy::Connected) {
    const CityIndex index(d);
    auto user_of = [&](const std::string& id) {
        auto it = std::lower_bound(index.user_ids.begin(), index.user_ids.end(), id);
        return static_cast<NodeId>(it - index.user_ids.begin());
    };
    std::vector<Edge> edges;
    for (const auto& [a, b] : d.follows) {
        if (!(a < b) || !d.follows.contains({b, a})) continue;
        const NodeId u = user_of(a), v = user_of(b);
        const auto& vu = index.visited[u];
        const auto& vv = index.visited[v];
        auto x = vu.begin();
        auto y = vv.begin();
        bool shared = false;
        while (x != vu.end() && y != vv.end() && !shared) {
            if (*x < *y) ++x;
            else if (*y < *x) ++y;
            else shared = true;
        }
        if (shared) edges.emplace_back(u, v);
    }
    SocialGraph full(index.user_ids, edges);
    return policy == NodePolicy::AllUsers ? full : without_isolated(full);
}

}  // namespace citynet
