#include <gtest/gtest.h>

#include <tlt/abstraction.hpp>
#include <tlt/io.hpp>

#include "fixtures.hpp"

using namespace tlt;

namespace {

LinearSystemSpec identity_1d() {
    LinearSystemSpec s;
    s.A = {{1}};
    s.B = {{1}};
    s.X = {{0}, {2}};
    s.U = {{0}, {0}};
    s.W = {{0}, {0}};
    return s;
}

}  // namespace

TEST(Abstraction, IdentityOneCellSelfLoop) {
    auto cts = abstract_linear(identity_1d(), {{1}, {1}});
    ASSERT_EQ(cts.size(), 2u);  // the cell plus the out state
    ASSERT_EQ(cts.num_inputs(), 1u);
    EXPECT_EQ(cts.successors(0, 0), (std::vector<StateId>{0}));
    EXPECT_EQ(cts.successors(1, 0), (std::vector<StateId>{1}));
    EXPECT_EQ(cts.label_names(1), (std::vector<std::string>{kOutAtom}));
}

TEST(Abstraction, ShiftCoversOverlappedCells) {
    auto s = identity_1d();
    s.X = {{0}, {4}};
    s.U = {{0.5}, {0.5}};
    auto cts = abstract_linear(s, {{4}, {1}});
    for (StateId c = 0; c < 3; ++c) EXPECT_EQ(cts.successors(c, 0), (std::vector<StateId>{c, c + 1}));
    EXPECT_EQ(cts.successors(3, 0), (std::vector<StateId>{3, 4}));
    s.W = {{-0.25}, {0.25}};
    EXPECT_EQ(abstract_linear(s, {{4}, {1}}).successors(1, 0), (std::vector<StateId>{1, 2}));
    // boundary contact counts as overlap
    s.W = {{0}, {0}};
    s.U = {{1}, {1}};
    EXPECT_EQ(abstract_linear(s, {{4}, {1}}).successors(1, 0), (std::vector<StateId>{1, 2, 3}));
}

TEST(Abstraction, InnerAndOuterLabels) {
    auto s = identity_1d();
    s.X = {{0}, {4}};
    s.regions = {{"in", {{0.5}, {2}}, LabelMode::Inner}, {"out_", {{0.5}, {2}}, LabelMode::Outer}};
    auto cts = abstract_linear(s, {{4}, {1}});
    EXPECT_EQ(cts.label_set("in"), StateSet(5, {1}));
    EXPECT_EQ(cts.label_set("out_"), StateSet(5, {0, 1, 2}));
}

TEST(Abstraction, SampleInputsIncludeEndpoints) {
    auto u = sample_inputs({{-2}, {2}}, {9});
    ASSERT_EQ(u.size(), 9u);
    EXPECT_DOUBLE_EQ(u.front()[0], -2);
    EXPECT_DOUBLE_EQ(u[4][0], 0);
    EXPECT_DOUBLE_EQ(u.back()[0], 2);
    auto grid = sample_inputs({{0, -1}, {1, 1}}, {2, 3});
    ASSERT_EQ(grid.size(), 6u);
    EXPECT_EQ(grid[1], (std::vector<double>{1, -1}));
    EXPECT_EQ(grid[2], (std::vector<double>{0, 0}));
    EXPECT_EQ(sample_inputs({{0}, {4}}, {1}).front(), (std::vector<double>{2}));
}

TEST(Abstraction, GridLocate) {
    Grid g({{-10, -10}, {2, 2}}, {60, 40});
    EXPECT_EQ(g.cells(), 2400u);
    auto c = g.locate({1, -5});
    EXPECT_EQ(g.unflatten(c), (std::vector<std::size_t>{55, 16}));
    EXPECT_EQ(g.locate({2, 2}), g.flatten({59, 39}));
    EXPECT_EQ(g.locate({2.5, 0}), g.cells());
    auto b = g.cell(c);
    EXPECT_LE(b.lo[0], 1.0);
    EXPECT_GT(b.hi[0], 1.0);
}

TEST(Abstraction, Errors) {
    auto s = identity_1d();
    EXPECT_THROW(abstract_linear(s, {{1, 1}, {1}}), DimensionMismatch);
    EXPECT_THROW(abstract_linear(s, {{0}, {1}}), EmptyGrid);
    EXPECT_THROW(abstract_linear(s, {{1}, {0}}), EmptyGrid);
    s.B = {{1}, {1}};
    EXPECT_THROW(abstract_linear(s, {{1}, {1}}), DimensionMismatch);
    s = identity_1d();
    s.initial = {{5}};
    EXPECT_THROW(abstract_linear(s, {{1}, {1}}), InvalidSystem);
    s = identity_1d();
    s.X = {{1}, {0}};
    EXPECT_THROW(abstract_linear(s, {{1}, {1}}), DimensionMismatch);
}

TEST(DoubleIntegrator, AbstractionIsTotal) {
    auto cts = controlled_from_json(read_json_file(fixtures::data_path("double_integrator.json")));
    EXPECT_EQ(cts.size(), 2401u);
    EXPECT_EQ(cts.num_inputs(), 9u);
    for (StateId x = 0; x < cts.size(); ++x) EXPECT_FALSE(cts.admissible(x).empty()) << cts.state_name(x);
    Grid g({{-10, -10}, {2, 2}}, {60, 40});
    EXPECT_EQ(cts.initial(), StateSet(2401, {g.locate({1, -5}), g.locate({-4.5, -2.5}), g.locate({0, -2})}));
    EXPECT_EQ(cts.state_name(g.locate({-4.5, -2.5})), "c27_25");
    for (auto& u : cts.input_vectors()) {
        EXPECT_GE(u[0], -2);
        EXPECT_LE(u[0], 2);
    }
    EXPECT_FALSE(cts.label_set("a6").empty());
}

TEST(SingleIntegrator, GridOverride) {
    auto j = read_json_file(fixtures::data_path("single_integrator.json"));
    EXPECT_EQ(controlled_from_json(j).size(), 751u);
    EXPECT_EQ(controlled_from_json(j, GridSpec{{150, 40}, {5, 3}}).size(), 6001u);
}
