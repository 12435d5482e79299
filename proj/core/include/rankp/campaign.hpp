// Copyright 2026 The rankp Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Batches of independent tomography runs over a state ensemble.
 *
 * Run r of every protocol sees the same true state, drawn from the stream
 * (seed, r, state tag); the measurement noise of (protocol, r) comes from
 * its own stream. Results therefore do not depend on thread count or
 * scheduling order.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "rankp/simulator.hpp"

namespace rankp {

enum class StateEnsemble { PureHaar, BuresMixed, Explicit };

[[nodiscard]] std::string_view to_string(StateEnsemble e) noexcept;
/// Accepts "pure" / "pure-haar", "bures" / "bures-mixed", "explicit".
[[nodiscard]] StateEnsemble parse_ensemble(std::string_view name);

struct CampaignConfig {
    std::vector<Protocol> protocols;
    StateEnsemble ensemble = StateEnsemble::PureHaar;
    std::optional<DensityMatrix> explicit_state;
    int runs = 50;
    std::uint64_t seed = 42;
    Schedule schedule;
    SourceModel source;
    MleOptions mle;
    PlanOptions plan;
    bool warm_start = false;
    bool keep_records = false;
    int threads = 0; ///< 0 picks std::thread::hardware_concurrency()

    void validate() const;
};

DensityMatrix campaign_true_state(const CampaignConfig &config, int run);
std::uint64_t campaign_run_seed(const CampaignConfig &config, Protocol protocol, int run);

using RunCallback = std::function<void(Protocol, const TomographyTrace &)>;

/// Runs every (protocol, run) pair; traces come back ordered by run index.
/// `on_run` is called once per finished run, serialized across threads.
std::map<Protocol, std::vector<TomographyTrace>> run_campaign(const CampaignConfig &config,
                                                              const RunCallback &on_run = {});

} // namespace rankp
