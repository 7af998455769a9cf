#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "citynet/dataset.hpp"

namespace fixture {

struct V {
    std::string id;
    double lat, lon;
    citynet::Category category = citynet::Category::Food;
};

inline citynet::CityDataset dataset(const std::vector<V>& venues,
                                    const std::vector<std::tuple<std::string, std::string, std::int64_t>>& checkins,
                                    const citynet::FollowSet& follows = {}) {
    std::map<std::string, citynet::Venue> vs;
    for (const auto& v : venues) vs.emplace(v.id, citynet::Venue{v.id, v.id + " place", {v.lat, v.lon}, v.category});
    std::vector<citynet::CheckIn> cs;
    for (const auto& [u, v, t] : checkins) cs.push_back({u, v, t});
    return citynet::assemble_dataset(std::move(vs), std::move(cs), follows);
}

/// Both directions of each pair.
inline citynet::FollowSet mutual(const std::vector<std::pair<std::string, std::string>>& pairs) {
    citynet::FollowSet out;
    for (const auto& [a, b] : pairs) {
        out.emplace(a, b);
        out.emplace(b, a);
    }
    return out;
}

}  // namespace fixture
