#include <gtest/gtest.h>

#include <tlt/io.hpp>
#include <tlt/systems.hpp>

#include "fixtures.hpp"

using namespace tlt;

TEST(StateSet, Algebra) {
    StateSet a(70, {1, 3, 65}), b(70, {3, 4});
    EXPECT_EQ((a & b), StateSet(70, {3}));
    EXPECT_EQ((a | b), StateSet(70, {1, 3, 4, 65}));
    EXPECT_EQ((a - b), StateSet(70, {1, 65}));
    EXPECT_EQ(a.complement().size(), 67u);
    EXPECT_TRUE(StateSet(70, {3}).subset_of(a));
    EXPECT_FALSE(a.subset_of(b));
    EXPECT_EQ(StateSet::full(70).size(), 70u);
    EXPECT_EQ(StateSet::full(70).complement().size(), 0u);
    EXPECT_EQ(a.first(), 1u);
    EXPECT_EQ(StateSet(70).first(), 70u);
    EXPECT_EQ(a.members(), (std::vector<std::size_t>{1, 3, 65}));
}

TEST(TransitionSystem, TrafficLightPostAndLabels) {
    auto ts = fixtures::traffic_light();
    EXPECT_EQ(ts.post(0), StateSet(5, {1, 4}));
    EXPECT_EQ(ts.post(4), StateSet(5, {0}));
    EXPECT_EQ(ts.label_set("r"), StateSet(5, {0, 1}));
    EXPECT_EQ(ts.label_set("y"), StateSet(5, {1, 3}));
    EXPECT_EQ(ts.label_set("g"), StateSet(5, {2}));
    EXPECT_EQ(ts.label_set("b"), StateSet(5, {4}));
    EXPECT_THROW(ts.label_set("zzz"), UnknownAtom);
    EXPECT_FALSE(ts.deterministic());
}

TEST(TransitionSystem, RejectsDeadlockState) {
    std::vector<std::vector<StateId>> succ{{1}, {}};
    EXPECT_THROW(TransitionSystem(succ, StateSet(2, {0}), {}, {}), InvalidSystem);
}

TEST(TransitionSystem, LoadsTrafficLightJson) {
    auto sys = system_from_json(read_json_file(fixtures::data_path("traffic_light.json")));
    ASSERT_TRUE(std::holds_alternative<TransitionSystem>(sys));
    auto& ts = std::get<TransitionSystem>(sys);
    auto ref = fixtures::traffic_light();
    ASSERT_EQ(ts.size(), ref.size());
    for (StateId x = 0; x < ts.size(); ++x) {
        EXPECT_EQ(ts.successors(x), ref.successors(x));
        EXPECT_EQ(ts.label_names(x), ref.label_names(x));
        EXPECT_EQ(ts.state_name(x), ref.state_name(x));
    }
    EXPECT_EQ(ts.initial(), ref.initial());
}

TEST(ControlledSystem, Example7AdmissibleAndPost) {
    auto cts = fixtures::example7();
    EXPECT_EQ(cts.admissible(0), ControlSet(2, {0}));
    EXPECT_EQ(cts.admissible(1), ControlSet(2, {0, 1}));
    EXPECT_EQ(cts.post(1, 1), StateSet(4, {3}));
    EXPECT_EQ(cts.inputs_into(1, StateSet(4, {1, 3})), ControlSet(2, {1}));
    EXPECT_EQ(cts.inputs_into(3, StateSet(4, {1, 3})), ControlSet(2, {0}));
}

TEST(ControlledSystem, LoadsExample7Json) {
    auto sys = system_from_json(read_json_file(fixtures::data_path("example7.json")));
    ASSERT_TRUE(std::holds_alternative<ControlledTransitionSystem>(sys));
    auto& cts = std::get<ControlledTransitionSystem>(sys);
    auto ref = fixtures::example7();
    for (StateId x = 0; x < 4; ++x)
        for (InputId u = 0; u < 2; ++u) EXPECT_EQ(cts.successors(x, u), ref.successors(x, u));
}

TEST(ControlledSystem, RejectsStateWithoutInputs) {
    std::vector<std::vector<std::vector<StateId>>> succ{{{1}}, {{}}};
    EXPECT_THROW(ControlledTransitionSystem(succ, {"u"}, StateSet(2, {0}), {}, {}), InvalidSystem);
}

TEST(Json, RejectsUnknownLabelAndBadIds) {
    json j = {{"atoms", {"a"}}, {"states", {{{"id", 0}, {"labels", {"b"}}}}}, {"transitions", {{0, 0}}}};
    EXPECT_THROW(system_from_json(j), InvalidSystem);
    json k = {{"states", {{{"id", 1}}}}, {"transitions", json::array()}};
    EXPECT_THROW(system_from_json(k), InvalidSystem);
    json m = {{"states", {{{"id", 0}}}}, {"transitions", {{0, 3}}}};
    EXPECT_THROW(system_from_json(m), InvalidSystem);
}

TEST(Lasso, FoldsPositions) {
    Lasso l{{7, 8}, {1, 2, 3}};
    EXPECT_EQ(l.at(0), 7u);
    EXPECT_EQ(l.at(2), 1u);
    EXPECT_EQ(l.at(5), 1u);
    EXPECT_EQ(l.at(9), 2u);
    EXPECT_EQ(l.at(10), 3u);
    EXPECT_EQ(l.next_pos(4), 2u);
}

TEST(Lasso, ConsistencyOnTrafficLight) {
    auto ts = fixtures::traffic_light();
    EXPECT_TRUE(lasso_consistent(ts, Lasso{{}, {0, 1, 2, 3}}));
    EXPECT_TRUE(lasso_consistent(ts, Lasso{{0}, {4, 0}}));
    EXPECT_FALSE(lasso_consistent(ts, Lasso{{}, {0, 2}}));
    EXPECT_FALSE(lasso_consistent(ts, Lasso{{0}, {}}));
}
