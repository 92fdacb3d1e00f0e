// Copyright 2026 The dmetvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <string>

#include "dmetvqe/config.hpp"
#include "runner.hpp"

namespace dmetvqe {
namespace {

const std::string kDir = DMETVQE_CONFIG_DIR;

ExperimentConfig parse(const std::string &text) { return parse_config_text(text); }

TEST(Config, LinspaceExpandsInclusively) {
    auto c = parse(R"({"model": {"dimension": 1, "Lx": 40}, "sweep": {"U": 2, "filling": {"linspace": [0.25, 1.0, 4]}}})");
    ASSERT_EQ(c.runs.size(), 4u);
    EXPECT_DOUBLE_EQ(c.runs[0].n_bar, 0.25);
    EXPECT_DOUBLE_EQ(c.runs[3].n_bar, 1.0);
    EXPECT_EQ(c.runs[1].model.N_occ, 20);
    EXPECT_EQ(c.runs[3].model.N_occ, 40);
}

TEST(Config, SweepOrderIsUThenFillingThenFragment) {
    auto c = parse(R"({"model": {"dimension": 1}, "sweep": {"U": [1, 2], "filling": [0.5, 1], "N_frag": [1, 2]}})");
    ASSERT_EQ(c.runs.size(), 8u);
    EXPECT_EQ(c.runs[1].fragment.size(), 2);
    EXPECT_DOUBLE_EQ(c.runs[2].n_bar, 1.0);
    EXPECT_DOUBLE_EQ(c.runs[4].model.U, 2.0);
    for (std::size_t k = 0; k < c.runs.size(); ++k) EXPECT_EQ(c.runs[k].index, k);
}

TEST(Config, FragmentsParseFromSizesAndShapes) {
    auto c = parse(R"({"model": {"dimension": 2, "Lx": 8, "Ly": 8, "N_occ": 32},
                       "sweep": {"fragment": [2, "2x2", {"Nx": 1, "Ny": 3}]}})");
    ASSERT_EQ(c.runs.size(), 3u);
    EXPECT_EQ(c.runs[0].fragment.Nx, 1);
    EXPECT_EQ(c.runs[0].fragment.Ny, 2);
    EXPECT_EQ(c.runs[1].fragment.size(), 4);
    EXPECT_EQ(c.runs[2].fragment.Ny, 3);
    EXPECT_THROW(parse(R"({"model": {"dimension": 1}, "sweep": {"N_frag": ["2x2"]}})"), ConfigError);
}

TEST(Config, EdRunsHaveNoDepthAndSeedsRepeat) {
    auto c = parse(R"({"model": {"dimension": 1}, "solver": {"kind": "ed", "seeds": [3, 4], "repeats": 2},
                       "sweep": {"U": 4, "filling": 1, "depth": [1, 2, 3]}})");
    ASSERT_EQ(c.runs.size(), 4u);
    EXPECT_EQ(c.runs[0].dmet.vqe.depth, 0);
    EXPECT_EQ(c.runs[0].seed, 3u);
    EXPECT_EQ(c.runs[1].seed, 3u + 1000003u);
    EXPECT_EQ(c.runs[2].seed, 4u);
}

TEST(Config, SampledDefaultsFollowTheFragmentSize) {
    auto c = parse(R"({"model": {"dimension": 1}, "solver": {"kind": "vqe-sampled"}, "sweep": {"filling": 1, "N_frag": [1, 2]}})");
    ASSERT_EQ(c.runs.size(), 2u);
    EXPECT_EQ(c.runs[0].dmet.vqe.optimizer, OptimizerKind::SPSA);
    EXPECT_EQ(c.runs[0].dmet.vqe.spsa.max_iters, default_spsa_iterations(1));
    EXPECT_EQ(c.runs[1].dmet.vqe.spsa.max_iters, default_spsa_iterations(2));
    EXPECT_DOUBLE_EQ(c.runs[0].dmet.tol(), 0.5);
    auto fixed = parse(R"({"model": {"dimension": 1}, "solver": {"kind": "vqe-sampled", "spsa": {"max_iters": 50}},
                           "sweep": {"filling": 1, "N_frag": [2]}})");
    EXPECT_EQ(fixed.runs[0].dmet.vqe.spsa.max_iters, 50);
}

TEST(Config, ErrorsNameTheirLocation) {
    try {
        parse("{\n  \"model\": {\"dimension\": 1},\n  \"sweep\": {\"U\": [1,]}\n}");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try {
        parse(R"({"model": {"dimension": 1}, "solver": {"kind": "ed", "shotz": 3}})");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("shotz"), std::string::npos);
    }
    EXPECT_THROW(parse(R"({"model": {"dimension": 1}, "solver": {"kind": "dft"}})"), ConfigError);
    EXPECT_THROW(parse(R"({"model": {"dimension": 1, "Lx": 40}, "sweep": {"filling": 1, "N_frag": [50]}})"), ConfigError);
    EXPECT_THROW(parse(R"({"model": {"dimension": 1, "Lx": 40}, "solver": {"spsa": {"max_iters": "many"}}})"), ConfigError);
    EXPECT_THROW(parse(R"({"sweep": {}})"), ConfigError);
    EXPECT_THROW(load_config(kDir + "/does_not_exist.json"), ConfigError);
}

TEST(Config, ShippedConfigsExpand) {
    EXPECT_EQ(load_config(kDir + "/fig3.json").runs.size(), 180u);
    EXPECT_EQ(load_config(kDir + "/fig3_ed.json").runs.size(), 180u);
    EXPECT_EQ(load_config(kDir + "/fig4.json").runs.size(), 96u);
    EXPECT_EQ(load_config(kDir + "/fig4_ed.json").runs.size(), 96u);
    EXPECT_EQ(load_config(kDir + "/sampled.json").runs.size(), 200u);
    EXPECT_EQ(load_config(kDir + "/table2_1d.json").runs.size(), 8u);
    EXPECT_EQ(load_config(kDir + "/quickstart.json").runs.size(), 4u);
    EXPECT_TRUE(load_config(kDir + "/empty.json").runs.empty());
    load_config(kDir + "/table3_2d.json");
    load_config(kDir + "/schedule_1d.json");
}

TEST(Config, HashDependsOnContentOnly) {
    auto a = parse(R"({"model": {"dimension": 1, "Lx": 40}, "sweep": {"U": 2, "filling": 1}})");
    auto b = parse("{ \"sweep\": {\"filling\": 1, \"U\": 2},\n \"model\": {\"Lx\": 40, \"dimension\": 1} }");
    auto c = parse(R"({"model": {"dimension": 1, "Lx": 40}, "sweep": {"U": 3, "filling": 1}})");
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_NE(a.hash, c.hash);
    EXPECT_EQ(a.hash.size(), 16u);
}

TEST(Config, CsvHasHeaderCommentAndFixedColumns) {
    auto c = parse(R"({"model": {"dimension": 1, "Lx": 40}, "sweep": {"U": 2, "filling": 1}})");
    runner::RunOutcome o;
    o.spec = c.runs[0];
    DMETResult r;
    r.energy_per_site = -0.5;
    o.result = r;
    o.reference = -0.4;
    std::string text = runner::csv_text(c, {o}, false);
    EXPECT_EQ(text.rfind("# dmetvqe " + std::string(kVersion) + " config " + c.hash + "\n", 0), 0u);
    auto cells = runner::csv_row(o, false);
    ASSERT_EQ(cells.size(), runner::csv_columns().size());
    EXPECT_EQ(runner::csv_columns().size(), 23u);
    EXPECT_EQ(cells[11], "ed");
    EXPECT_EQ(cells[12], "-");
    EXPECT_EQ(cells[13], "0");
    EXPECT_EQ(cells[20], "0.25");
    EXPECT_EQ(cells[22], "0");
}

}  // namespace
}  // namespace dmetvqe
