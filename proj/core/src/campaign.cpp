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

#include "rankp/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace rankp {

namespace {

constexpr std::uint64_t kStateTag = 0x5354415445ULL; // "STATE"

std::uint64_t protocol_tag(Protocol p) { return 1 + static_cast<std::uint64_t>(p); }

} // namespace

std::string_view to_string(StateEnsemble e) noexcept {
    switch (e) {
    case StateEnsemble::PureHaar:
        return "pure";
    case StateEnsemble::BuresMixed:
        return "bures";
    case StateEnsemble::Explicit:
        return "explicit";
    }
    return "unknown";
}

StateEnsemble parse_ensemble(std::string_view name) {
    if (name == "pure" || name == "pure-haar") {
        return StateEnsemble::PureHaar;
    }
    if (name == "bures" || name == "bures-mixed" || name == "mixed") {
        return StateEnsemble::BuresMixed;
    }
    if (name == "explicit") {
        return StateEnsemble::Explicit;
    }
    throw std::invalid_argument("unknown state ensemble '" + std::string(name) +
                                "' (expected pure, bures or explicit)");
}

void CampaignConfig::validate() const {
    if (protocols.empty()) {
        throw std::invalid_argument("campaign needs at least one protocol");
    }
    if (runs < 1) {
        throw std::invalid_argument("campaign needs runs >= 1");
    }
    if (ensemble == StateEnsemble::Explicit && !explicit_state) {
        throw std::invalid_argument("explicit ensemble requires a state");
    }
    schedule.validate();
    source.validate();
    if (mle.max_iter < 1 || !(mle.tol > 0.0)) {
        throw std::invalid_argument("MLE options need max_iter >= 1 and tol > 0");
    }
    if (!(plan.delta > 0.0 && plan.delta < 1.0)) {
        throw std::invalid_argument("regularization delta must lie in (0, 1)");
    }
}

DensityMatrix campaign_true_state(const CampaignConfig &config, int run) {
    if (config.ensemble == StateEnsemble::Explicit) {
        return config.explicit_state.value();
    }
    Rng rng = make_rng(substream_seed(config.seed, static_cast<std::uint64_t>(run), kStateTag));
    return config.ensemble == StateEnsemble::PureHaar ? random_pure_haar(2, rng)
                                                      : random_bures_mixed(2, rng);
}

std::uint64_t campaign_run_seed(const CampaignConfig &config, Protocol protocol, int run) {
    return substream_seed(config.seed, static_cast<std::uint64_t>(run), protocol_tag(protocol));
}

std::map<Protocol, std::vector<TomographyTrace>> run_campaign(const CampaignConfig &config,
                                                              const RunCallback &on_run) {
    config.validate();
    const std::size_t per_protocol = static_cast<std::size_t>(config.runs);
    const std::size_t jobs = config.protocols.size() * per_protocol;
    std::vector<std::optional<TomographyTrace>> slots(jobs);

    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) {
                return;
            }
            {
                std::lock_guard lock(failure_mutex);
                if (failure) {
                    return;
                }
            }
            const Protocol protocol = config.protocols[job / per_protocol];
            const int run = static_cast<int>(job % per_protocol);
            try {
                RunOptions opts;
                opts.mle = config.mle;
                opts.plan = config.plan;
                opts.warm_start = config.warm_start;
                opts.keep_records = config.keep_records;
                opts.run_id = run;
                const auto truth = campaign_true_state(config, run);
                slots[job] = run_tomography(protocol, truth, config.source, config.schedule,
                                            campaign_run_seed(config, protocol, run), opts);
                if (on_run) {
                    std::lock_guard lock(callback_mutex);
                    on_run(protocol, *slots[job]);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };

    unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::map<Protocol, std::vector<TomographyTrace>> out;
    for (std::size_t job = 0; job < jobs; ++job) {
        out[config.protocols[job / per_protocol]].push_back(std::move(*slots[job]));
    }
    return out;
}

} // namespace rankp
