// Copyright 2026 The Nanogrid P2P Authors. All rights reserved.
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

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "nanogrid/clock.hpp"
#include "nanogrid/demand.hpp"
#include "nanogrid/errors.hpp"
#include "nanogrid/scenario.hpp"

namespace nanogrid {
namespace {

std::size_t index_of(const std::vector<Appliance>& catalog, const std::string& name) {
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (catalog[i].name == name) return i;
  }
  ADD_FAILURE() << "no appliance " << name;
  return 0;
}

OccupantChain::Matrix identity() {
  OccupantChain::Matrix m{};
  for (int i = 0; i < kRoomsPerNanogrid; ++i) m[i][i] = 1.0;
  return m;
}

TEST(Occupant, AbsorbingAndDegenerateRows) {
  const auto catalog = default_appliance_catalog();
  OccupantChain absorbing(identity(), std::vector<double>(catalog.size(), 0.0));
  Rng rng(3);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(step_occupant(2, absorbing, rng), 2);

  OccupantChain::Matrix to_one{};
  for (auto& row : to_one) row = {1.0, 0.0, 0.0, 0.0};
  OccupantChain degenerate(to_one, std::vector<double>(catalog.size(), 0.0));
  for (int room = 1; room <= 4; ++room) EXPECT_EQ(step_occupant(room, degenerate, rng), 1);
}

TEST(Occupant, SeedReplay) {
  const auto catalog = default_appliance_catalog();
  const OccupantChain chain = OccupantChain::with_defaults(catalog);
  Rng a(42), b(42);
  int ra = 1, rb = 1;
  for (int i = 0; i < 1000; ++i) {
    ra = step_occupant(ra, chain, a);
    rb = step_occupant(rb, chain, b);
    ASSERT_EQ(ra, rb) << "step " << i;
  }
}

TEST(Occupant, RejectsInvalidChains) {
  auto m = OccupantChain::uniform_move_matrix(0.7);
  m[2][0] += 1e-9;
  EXPECT_THROW(OccupantChain(m, {0.1}), ConfigError);
  EXPECT_THROW(OccupantChain(OccupantChain::uniform_move_matrix(0.7), {1.5}), ConfigError);
  auto neg = identity();
  neg[0] = {1.5, -0.5, 0.0, 0.0};
  EXPECT_THROW(OccupantChain(neg, {0.1}), ConfigError);
}

TEST(Occupant, LumpedStationaryFrequency) {
  // Rooms {1,2} and {3,4} form two lumps: leave the first with probability
  // 0.2 and the second with 0.3, so the first lump holds 0.3 / 0.5 = 0.6 of
  // the time.
  OccupantChain::Matrix m = {{{0.5, 0.3, 0.1, 0.1},
                              {0.4, 0.4, 0.15, 0.05},
                              {0.2, 0.1, 0.3, 0.4},
                              {0.15, 0.15, 0.6, 0.1}}};
  OccupantChain chain(m, {});
  Rng rng(2024);
  int room = 1;
  long in_first = 0;
  const long steps = 100000;
  for (long i = 0; i < steps; ++i) {
    room = step_occupant(room, chain, rng);
    in_first += room <= 2;
  }
  const double freq = static_cast<double>(in_first) / steps;
  EXPECT_NEAR(freq, 0.6, 0.02 * 0.6);
}

TEST(LoadRequests, ZeroProbabilityGivesNothing) {
  const auto catalog = default_appliance_catalog();
  OccupantChain chain(OccupantChain::uniform_move_matrix(0.7),
                      std::vector<double>(catalog.size(), 0.0));
  Rng rng(1);
  for (int room = 1; room <= 4; ++room) {
    EXPECT_TRUE(draw_load_requests(room, chain, catalog, 5, rng).empty());
  }
}

TEST(LoadRequests, RoomGating) {
  const auto catalog = default_appliance_catalog();
  const std::size_t tv = index_of(catalog, "tv");
  const std::size_t vacuum = index_of(catalog, "vacuum_cleaner");
  std::vector<double> p(catalog.size(), 0.0);
  p[tv] = 1.0;
  p[vacuum] = 1.0;
  OccupantChain chain(OccupantChain::uniform_move_matrix(0.7), p);
  Rng rng(9);

  const auto in_two = draw_load_requests(2, chain, catalog, 17, rng);
  ASSERT_EQ(in_two.size(), 2u);
  const LoadRequest& r = in_two[0].appliance == tv ? in_two[0] : in_two[1];
  EXPECT_EQ(r.appliance, tv);
  EXPECT_EQ(r.interval, 17);
  EXPECT_DOUBLE_EQ(r.power_kw, 0.130);
  EXPECT_FALSE(r.schedulable);
  EXPECT_GE(r.duration, 1);

  EXPECT_TRUE(draw_load_requests(1, chain, catalog, 17, rng).empty());
}

TEST(LoadRequests, HvacInEveryRoom) {
  const auto catalog = default_appliance_catalog();
  const std::size_t ac = index_of(catalog, "air_conditioner");
  std::vector<double> p(catalog.size(), 0.0);
  p[ac] = 1.0;
  OccupantChain chain(OccupantChain::uniform_move_matrix(0.7), p);
  Rng rng(4);
  for (int room = 1; room <= 4; ++room) {
    const auto reqs = draw_load_requests(room, chain, catalog, 0, rng);
    ASSERT_EQ(reqs.size(), 1u);
    EXPECT_EQ(reqs[0].appliance, ac);
  }
}

TEST(ClusterDemand, Sums) {
  const std::vector<double> loads = {1.21, 0.13, 0.0};
  EXPECT_NEAR(cluster_demand(loads), 1.34, 1e-15);
  EXPECT_DOUBLE_EQ(cluster_demand(std::vector<double>{}), 0.0);
  const auto catalog = default_appliance_catalog();
  const double hvac = catalog[index_of(catalog, "air_conditioner")].power_kw +
                      catalog[index_of(catalog, "heater")].power_kw;
  EXPECT_NEAR(cluster_demand(std::vector<double>{hvac}), 2.37, 1e-15);
  EXPECT_THROW(cluster_demand(std::vector<double>{1.0, -0.1}), DomainError);
}

TEST(ClusterDemand, BoundedByRatedPower) {
  ScenarioConfig cfg;
  cfg.clusters = 3;
  cfg.days = 4;
  cfg.seed = 17;
  const Scenario s(cfg);
  double rated = 0.0;
  for (const Appliance& a : cfg.catalog) rated += a.power_kw;
  rated *= cfg.nanogrids_per_cluster;
  for (int d = 0; d < cfg.days; ++d) {
    for (int k = 0; k < cfg.clusters; ++k) {
      for (int n = 0; n < kIntervalsPerDay; ++n) {
        EXPECT_GE(s.day(d).load_kw[k][n], 0.0);
        EXPECT_LE(s.day(d).load_kw[k][n], rated + 1e-12);
        EXPECT_GE(s.day(d).unscheduled_kw[k][n], 0.0);
        EXPECT_LE(s.day(d).unscheduled_kw[k][n], rated + 1e-12);
      }
    }
  }
}

TEST(Occupant, SameSeedSameRequests) {
  const auto catalog = default_appliance_catalog();
  const OccupantChain chain = OccupantChain::with_defaults(catalog);
  Rng a(77), b(77);
  const OccupantTrace ta = simulate_occupant(chain, catalog, 1, 144, 6, a);
  const OccupantTrace tb = simulate_occupant(chain, catalog, 1, 144, 6, b);
  EXPECT_EQ(ta.rooms, tb.rooms);
  ASSERT_EQ(ta.requests.size(), tb.requests.size());
  for (std::size_t i = 0; i < ta.requests.size(); ++i) {
    EXPECT_EQ(ta.requests[i].appliance, tb.requests[i].appliance);
    EXPECT_EQ(ta.requests[i].interval, tb.requests[i].interval);
    EXPECT_EQ(ta.requests[i].duration, tb.requests[i].duration);
  }
}

TEST(Occupant, AppliancesNeverOverlapThemselves) {
  const auto catalog = default_appliance_catalog();
  const OccupantChain chain = OccupantChain::with_defaults(catalog);
  Rng rng(5);
  const int d_max = 6;
  const OccupantTrace t = simulate_occupant(chain, catalog, 1, 144, d_max, rng);
  std::vector<int> busy_until(catalog.size(), -1);
  for (const LoadRequest& r : t.requests) {
    EXPECT_GE(r.interval, busy_until[r.appliance]) << catalog[r.appliance].name;
    busy_until[r.appliance] = r.interval + r.duration + (r.schedulable ? d_max : 0);
  }
}

TEST(Catalog, CsvRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "ng_catalog.csv";
  const auto catalog = default_appliance_catalog();
  save_appliance_catalog(path, catalog);
  const auto back = load_appliance_catalog(path);
  ASSERT_EQ(back.size(), catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    EXPECT_EQ(back[i].name, catalog[i].name);
    EXPECT_DOUBLE_EQ(back[i].power_kw, catalog[i].power_kw);
    EXPECT_EQ(back[i].room_mask, catalog[i].room_mask);
    EXPECT_EQ(back[i].schedulable, catalog[i].schedulable);
    EXPECT_EQ(back[i].category, catalog[i].category);
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace nanogrid
