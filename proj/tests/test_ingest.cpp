#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "citynet/dataset.hpp"
#include "citynet/ingest.hpp"
#include "citynet/synthetic.hpp"
#include "fixtures.hpp"

using namespace citynet;

namespace {

std::size_t error_line(auto&& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

std::vector<std::pair<std::string, std::string>> edge_labels(const SocialGraph& g) {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [u, v] : g.edges()) out.emplace_back(g.label(u), g.label(v));
    return out;
}

}  // namespace

TEST(ParseCheckins, Examples) {
    std::istringstream in("user_id,venue_id,unix_timestamp\nu1,v1,1290000000\n");
    const auto c = parse_checkins(in);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0], (CheckIn{"u1", "v1", 1290000000}));

    std::istringstream header_only("user_id,venue_id,unix_timestamp\n");
    EXPECT_TRUE(parse_checkins(header_only).empty());

    EXPECT_EQ(error_line([] {
                  std::istringstream bad("user_id,venue_id,unix_timestamp\nu1,v1,notatime\n");
                  parse_checkins(bad);
              }),
              2u);
}

TEST(ParseCheckins, MalformedLines) {
    EXPECT_EQ(error_line([] {
                  std::istringstream bad("user_id,venue_id,unix_timestamp\nu1,v1,5\nu2,v2\n");
                  parse_checkins(bad);
              }),
              3u);
    EXPECT_THROW(
        [] {
            std::istringstream neg("user_id,venue_id,unix_timestamp\nu1,v1,-5\n");
            parse_checkins(neg);
        }(),
        ParseError);
    EXPECT_THROW(
        [] {
            std::istringstream empty("");
            parse_checkins(empty);
        }(),
        ParseError);
    EXPECT_THROW(
        [] {
            std::istringstream fraction("user_id,venue_id,unix_timestamp\nu1,v1,12.5\n");
            parse_checkins(fraction);
        }(),
        ParseError);
}

TEST(ParseCheckins, KeepsFileOrder) {
    std::istringstream in("user_id,venue_id,unix_timestamp\nb,v,9\na,v,1\r\nc,w,5\n");
    const auto c = parse_checkins(in);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].user, "b");
    EXPECT_EQ(c[1].user, "a");
    EXPECT_EQ(c[2].venue, "w");
}

TEST(ParseVenues, Examples) {
    std::istringstream in("venue_id,name,lat,lon,category\nv1,Cafe X,42.36,-71.06,Food\n");
    const auto v = parse_venues(in);
    ASSERT_EQ(v.size(), 1u);
    const auto& x = v.at("v1");
    EXPECT_EQ(x.name, "Cafe X");
    EXPECT_DOUBLE_EQ(x.position.lat, 42.36);
    EXPECT_DOUBLE_EQ(x.position.lon, -71.06);
    EXPECT_EQ(x.category, Category::Food);

    EXPECT_EQ(error_line([] {
                  std::istringstream bad("venue_id,name,lat,lon,category\nv1,A,95.0,0,Food\n");
                  parse_venues(bad);
              }),
              2u);
    EXPECT_EQ(error_line([] {
                  std::istringstream bad("venue_id,name,lat,lon,category\nv1,A,1,2,Food\nv2,B,1,2,Gym\n");
                  parse_venues(bad);
              }),
              3u);
    EXPECT_EQ(error_line([] {
                  std::istringstream dup("venue_id,name,lat,lon,category\nv1,A,1,2,Food\nv1,B,1,2,Food\n");
                  parse_venues(dup);
              }),
              3u);
}

TEST(ParseVenues, QuotedNamesAndCategoryAlias) {
    std::istringstream in("venue_id,name,lat,lon,category\n"
                          "v1,\"Joe's, \"\"the\"\" place\",1,2,Food and Drink\n"
                          "v2,Gallery,0,0,Arts and Entertainment\n");
    const auto v = parse_venues(in);
    EXPECT_EQ(v.at("v1").name, "Joe's, \"the\" place");
    EXPECT_EQ(v.at("v1").category, Category::Food);
    EXPECT_EQ(v.at("v2").category, Category::ArtsEntertainment);
}

TEST(ParseFollows, Examples) {
    std::istringstream one("follower_id,followee_id\nu1,u2\n");
    EXPECT_EQ(parse_follows(one), (FollowSet{{"u1", "u2"}}));
    std::istringstream twice("follower_id,followee_id\nu1,u2\nu1,u2\n");
    EXPECT_EQ(parse_follows(twice).size(), 1u);
    std::istringstream self("follower_id,followee_id\nu1,u1\n");
    EXPECT_EQ(parse_follows(self).size(), 1u);
    std::istringstream bad("follower_id,followee_id\nu1\n");
    EXPECT_THROW(parse_follows(bad), ParseError);
}

TEST(CategoryClasses, Partition) {
    EXPECT_EQ(category_class(Category::Food), CategoryClass::Social);
    EXPECT_EQ(category_class(Category::NightlifeSpot), CategoryClass::Social);
    EXPECT_EQ(category_class(Category::Residence), CategoryClass::Social);
    EXPECT_EQ(category_class(Category::ProfessionalOther), CategoryClass::SemiSocial);
    EXPECT_EQ(category_class(Category::ShopService), CategoryClass::SemiSocial);
    for (auto c : {Category::ArtsEntertainment, Category::CollegeUniversity, Category::OutdoorsRecreation, Category::TravelTransport}) {
        EXPECT_EQ(category_class(c), CategoryClass::NonSocial);
    }
    for (auto c : kAllCategories) EXPECT_EQ(parse_category(to_string(c)), c);
    EXPECT_FALSE(parse_category("Gym").has_value());
}

TEST(Dataset, AssemblyDropsFollowsOutsideUsersAndValidates) {
    const auto d = fixture::dataset({{"v", 1, 1}}, {{"b", "v", 1}, {"a", "v", 2}}, {{"a", "b"}, {"a", "ghost"}});
    EXPECT_EQ(d.users, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(d.follows, (FollowSet{{"a", "b"}}));
    EXPECT_THROW(fixture::dataset({{"v", 1, 1}}, {{"a", "nowhere", 1}}), ValidationError);
    EXPECT_THROW(fixture::dataset({{"v", 1, 1}}, {{"a", "v", -1}}), ValidationError);
}

TEST(Dataset, ValidateCatchesBrokenInvariants) {
    auto d = fixture::dataset({{"v", 1, 1}}, {{"a", "v", 1}});
    d.users.push_back("b");
    EXPECT_THROW(validate(d), ValidationError);
}

TEST(Dataset, JsonRoundTrip) {
    SyntheticCityParams p;
    p.n_users = 120;
    p.n_venues = 80;
    p.seed = 5;
    const auto d = generate_synthetic_city(p);
    const auto text = to_json(d).dump();
    EXPECT_EQ(dataset_from_json(nlohmann::json::parse(text)), d);
}

TEST(Dataset, JsonErrors) {
    EXPECT_THROW(dataset_from_json(nlohmann::json::parse(R"({"users": []})")), ValidationError);
    EXPECT_THROW(dataset_from_json(nlohmann::json::parse("[1, 2]")), ValidationError);
    const auto unknown_venue = R"({"users": ["a"], "venues": [],
        "checkins": [{"user": "a", "venue": "v", "timestamp": 1}], "follows": []})";
    EXPECT_THROW(dataset_from_json(nlohmann::json::parse(unknown_venue)), ValidationError);
}

TEST(CityNetwork, Examples) {
    const std::vector<fixture::V> venues = {{"v1", 0, 0}, {"v2", 1, 1}};
    const auto both = fixture::dataset(venues, {{"u1", "v1", 1}, {"u2", "v1", 2}}, fixture::mutual({{"u1", "u2"}}));
    EXPECT_EQ(edge_labels(build_city_network(both)), (std::vector<std::pair<std::string, std::string>>{{"u1", "u2"}}));

    const auto one_way = fixture::dataset(venues, {{"u1", "v1", 1}, {"u2", "v1", 2}}, {{"u1", "u2"}});
    EXPECT_EQ(build_city_network(one_way).edge_count(), 0u);

    const auto disjoint = fixture::dataset(venues, {{"u1", "v1", 1}, {"u2", "v2", 2}}, fixture::mutual({{"u1", "u2"}}));
    EXPECT_EQ(build_city_network(disjoint).edge_count(), 0u);
}

TEST(CityNetwork, HandCheckedFiveUsers) {
    // a-b mutual, share v1 → tie ; b-c mutual, share v2 → tie ; c-d mutual, no shared venue
    // d→e one way, share v3 ; a-e mutual, share v1 → tie ; a→a self-follow
    const auto d = fixture::dataset({{"v1", 0, 0}, {"v2", 0, 1}, {"v3", 0, 2}, {"v4", 0, 3}},
                                    {{"a", "v1", 1}, {"b", "v1", 2}, {"b", "v2", 3}, {"c", "v2", 4}, {"d", "v3", 5},
                                     {"e", "v3", 6}, {"e", "v1", 7}, {"c", "v4", 8}},
                                    [] {
                                        auto f = fixture::mutual({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"a", "e"}});
                                        f.emplace("d", "e");
                                        f.emplace("a", "a");
                                        return f;
                                    }());
    const auto g = build_city_network(d);
    EXPECT_EQ(edge_labels(g), (std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "e"}, {"b", "c"}}));
    EXPECT_EQ(g.node_count(), 4u);
    EXPECT_EQ(build_city_network(d, NodePolicy::AllUsers).node_count(), 5u);
}

TEST(CityNetwork, NoReciprocalFollowsGivesEmptyGraph) {
    const auto d = fixture::dataset({{"v", 0, 0}}, {{"a", "v", 1}, {"b", "v", 1}}, {{"a", "b"}});
    const auto g = build_city_network(d);
    EXPECT_TRUE(g.empty());
}

TEST(CityNetwork, RemovingCheckinsNeverAddsEdges) {
    SyntheticCityParams p;
    p.n_users = 300;
    p.n_venues = 200;
    p.seed = 3;
    const auto d = generate_synthetic_city(p);
    const auto full = build_city_network(d, NodePolicy::AllUsers);
    std::mt19937_64 gen(1);
    for (int rep = 0; rep < 5; ++rep) {
        const std::string& victim = d.users[gen() % d.users.size()];
        auto checkins = d.checkins;
        // keep one check-in so the user stays in the dataset
        std::size_t seen = 0;
        std::erase_if(checkins, [&](const CheckIn& c) { return c.user == victim && seen++ > 0; });
        const auto reduced = assemble_dataset(d.venues, checkins, d.follows);
        const auto g = build_city_network(reduced, NodePolicy::AllUsers);
        for (auto [u, v] : g.edges()) EXPECT_TRUE(full.has_edge(*full.find(g.label(u)), *full.find(g.label(v))));
        EXPECT_LE(g.edge_count(), full.edge_count());
    }
}

TEST(CityNetwork, SymmetricWithoutSelfLoops) {
    SyntheticCityParams p;
    p.n_users = 300;
    p.n_venues = 200;
    p.seed = 9;
    const auto d = generate_synthetic_city(p);
    const auto g = build_city_network(d);
    for (auto [u, v] : g.edges()) {
        EXPECT_NE(u, v);
        EXPECT_TRUE(d.follows.contains({g.label(u), g.label(v)}));
        EXPECT_TRUE(d.follows.contains({g.label(v), g.label(u)}));
    }
}
