#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "citynet/error.hpp"
#include "citynet/geo.hpp"

namespace citynet {

/// Foursquare top-level venue categories.
enum class Category : std::uint8_t {
    ArtsEntertainment,
    CollegeUniversity,
    Food,
    NightlifeSpot,
    OutdoorsRecreation,
    ProfessionalOther,
    Residence,
    ShopService,
    TravelTransport,
};

inline constexpr std::size_t kCategoryCount = 9;

inline constexpr std::array<std::string_view, kCategoryCount> kCategoryLabels = {
    "Arts and Entertainment",
    "College and University",
    "Food",
    "Nightlife Spot",
    "Outdoors and Recreation",
    "Professional and Other Places",
    "Residence",
    "Shop and Service",
    "Travel and Transport",
};

inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::ArtsEntertainment, Category::CollegeUniversity, Category::Food,
    Category::NightlifeSpot,     Category::OutdoorsRecreation, Category::ProfessionalOther,
    Category::Residence,         Category::ShopService,        Category::TravelTransport,
};

inline std::string_view to_string(Category c) { return kCategoryLabels[static_cast<std::size_t>(c)]; }

inline std::optional<Category> parse_category(std::string_view label) {
    if (label == "Food and Drink") return Category::Food;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        if (kCategoryLabels[i] == label) return static_cast<Category>(i);
    }
    return std::nullopt;
}

enum class CategoryClass { Social, SemiSocial, NonSocial };

inline CategoryClass category_class(Category c) {
    switch (c) {
        case Category::Food:
        case Category::NightlifeSpot:
        case Category::Residence:
            return CategoryClass::Social;
        case Category::ProfessionalOther:
        case Category::ShopService:
            return CategoryClass::SemiSocial;
        default:
            return CategoryClass::NonSocial;
    }
}

struct Venue {
    std::string id;
    std::string name;
    LatLon position;
    Category category = Category::Food;

    friend bool operator==(const Venue&, const Venue&) = default;
};

struct CheckIn {
    std::string user;
    std::string venue;
    std::int64_t timestamp = 0;  // Unix seconds, UTC

    friend bool operator==(const CheckIn&, const CheckIn&) = default;
};

using FollowSet = std::set<std::pair<std::string, std::string>>;

/// One city's users, venues, check-ins and directed follow relation.
struct CityDataset {
    std::vector<std::string> users;  // sorted, unique
    std::map<std::string, Venue> venues;
    std::vector<CheckIn> checkins;
    FollowSet follows;

    friend bool operator==(const CityDataset&, const CityDataset&) = default;
};

/// Throws ValidationError naming the first broken invariant.
inline void validate(const CityDataset& d) {
    if (!std::is_sorted(d.users.begin(), d.users.end()) ||
        std::adjacent_find(d.users.begin(), d.users.end()) != d.users.end()) {
        throw ValidationError("user list must be sorted and unique");
    }
    auto is_user = [&](const std::string& u) { return std::binary_search(d.users.begin(), d.users.end(), u); };
    for (const auto& [id, v] : d.venues) {
        if (id != v.id) throw ValidationError("venue key '" + id + "' does not match venue id '" + v.id + "'");
        if (!in_range(v.position)) throw ValidationError("venue '" + id + "' has out-of-range coordinates");
    }
    std::vector<char> has_checkin(d.users.size(), 0);
    for (std::size_t i = 0; i < d.checkins.size(); ++i) {
        const auto& c = d.checkins[i];
        if (!d.venues.contains(c.venue)) {
            throw ValidationError("check-in " + std::to_string(i + 1) + " references unknown venue '" + c.venue + "'");
        }
        auto it = std::lower_bound(d.users.begin(), d.users.end(), c.user);
        if (it == d.users.end() || *it != c.user) {
            throw ValidationError("check-in " + std::to_string(i + 1) + " references unknown user '" + c.user + "'");
        }
        if (c.timestamp < 0) throw ValidationError("check-in " + std::to_string(i + 1) + " has a negative timestamp");
        has_checkin[static_cast<std::size_t>(it - d.users.begin())] = 1;
    }
    for (std::size_t i = 0; i < d.users.size(); ++i) {
        if (!has_checkin[i]) throw ValidationError("user '" + d.users[i] + "' has no check-ins");
    }
    for (const auto& [a, b] : d.follows) {
        if (!is_user(a) || !is_user(b)) throw ValidationError("follow (" + a + ", " + b + ") has an endpoint outside the user set");
    }
}

/// Assembles a dataset from parsed parts. Users are the distinct check-in
/// users; follows touching anyone else are dropped.
inline CityDataset assemble_dataset(std::map<std::string, Venue> venues, std::vector<CheckIn> checkins,
                                    const FollowSet& follows) {
    CityDataset d;
    d.users.reserve(checkins.size());
    for (const auto& c : checkins) d.users.push_back(c.user);
    std::sort(d.users.begin(), d.users.end());
    d.users.erase(std::unique(d.users.begin(), d.users.end()), d.users.end());
    auto is_user = [&](const std::string& u) { return std::binary_search(d.users.begin(), d.users.end(), u); };
    for (const auto& f : follows) {
        if (is_user(f.first) && is_user(f.second)) d.follows.insert(f);
    }
    d.venues = std::move(venues);
    d.checkins = std::move(checkins);
    validate(d);
    return d;
}

/// Dense integer view of a dataset: users and venues in ascending id order.
struct CityIndex {
    std::vector<std::string> user_ids;
    std::vector<const Venue*> venues;
    std::vector<std::vector<std::uint32_t>> visited;  // per user: sorted distinct venue indices
    std::vector<std::uint32_t> popularity;            // per venue: distinct visitors

    explicit CityIndex(const CityDataset& d) : user_ids(d.users) {
        venues.reserve(d.venues.size());
        std::unordered_map<std::string_view, std::uint32_t> venue_index;
        for (const auto& [id, v] : d.venues) {
            venue_index.emplace(id, static_cast<std::uint32_t>(venues.size()));
            venues.push_back(&v);
        }
        std::unordered_map<std::string_view, std::uint32_t> user_index;
        for (std::uint32_t i = 0; i < user_ids.size(); ++i) user_index.emplace(user_ids[i], i);
        visited.resize(user_ids.size());
        for (const auto& c : d.checkins) {
            auto u = user_index.find(c.user);
            auto v = venue_index.find(c.venue);
            if (u == user_index.end() || v == venue_index.end()) {
                throw ValidationError("check-in (" + c.user + ", " + c.venue + ") outside the dataset tables");
            }
            visited[u->second].push_back(v->second);
        }
        popularity.assign(venues.size(), 0);
        for (auto& vs : visited) {
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
            for (auto v : vs) ++popularity[v];
        }
    }

    std::size_t user_count() const noexcept { return user_ids.size(); }
    std::size_t venue_count() const noexcept { return venues.size(); }

    std::optional<std::uint32_t> venue_of(std::string_view id) const {
        auto it = std::lower_bound(venues.begin(), venues.end(), id,
                                   [](const Venue* v, std::string_view key) { return v->id < key; });
        if (it == venues.end() || (*it)->id != id) return std::nullopt;
        return static_cast<std::uint32_t>(it - venues.begin());
    }
};

// JSON document: {"users": [...], "venues": [{id,name,lat,lon,category}],
//                 "checkins": [{user,venue,timestamp}], "follows": [[a,b], ...]}

inline nlohmann::json to_json(const CityDataset& d) {
    nlohmann::json venues = nlohmann::json::array();
    for (const auto& [id, v] : d.venues) {
        venues.push_back({{"id", v.id},
                          {"name", v.name},
                          {"lat", v.position.lat},
                          {"lon", v.position.lon},
                          {"category", std::string(to_string(v.category))}});
    }
    nlohmann::json checkins = nlohmann::json::array();
    for (const auto& c : d.checkins) checkins.push_back({{"user", c.user}, {"venue", c.venue}, {"timestamp", c.timestamp}});
    nlohmann::json follows = nlohmann::json::array();
    for (const auto& [a, b] : d.follows) follows.push_back({a, b});
    return {{"users", d.users}, {"venues", std::move(venues)}, {"checkins", std::move(checkins)}, {"follows", std::move(follows)}};
}

/// Throws ValidationError on schema or invariant violations.
inline CityDataset dataset_from_json(const nlohmann::json& j) {
    CityDataset d;
    try {
        d.users = j.at("users").get<std::vector<std::string>>();
        for (const auto& jv : j.at("venues")) {
            Venue v;
            v.id = jv.at("id").get<std::string>();
            v.name = jv.at("name").get<std::string>();
            v.position = {jv.at("lat").get<double>(), jv.at("lon").get<double>()};
            const auto label = jv.at("category").get<std::string>();
            auto cat = parse_category(label);
            if (!cat) throw ValidationError("venue '" + v.id + "' has unknown category '" + label + "'");
            v.category = *cat;
            if (!d.venues.emplace(v.id, v).second) throw ValidationError("duplicate venue id '" + v.id + "'");
        }
        for (const auto& jc : j.at("checkins")) {
            d.checkins.push_back({jc.at("user").get<std::string>(), jc.at("venue").get<std::string>(),
                                  jc.at("timestamp").get<std::int64_t>()});
        }
        for (const auto& jf : j.at("follows")) {
            if (!jf.is_array() || jf.size() != 2) throw ValidationError("follow entries must be [follower, followee]");
            d.follows.emplace(jf[0].get<std::string>(), jf[1].get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("dataset JSON: ") + e.what());
    }
    validate(d);
    return d;
}

}  // namespace citynet
