// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semseg/frame.hpp"
#include "semseg/prediction.hpp"
#include "semseg/taxonomy.hpp"

namespace semseg {

/// One generated segment: a family label selects the emission shape
/// (counter, latency, pressure, network, state, structural), each
/// driven by that segment's AR(1) latent.
struct SynthSegmentConfig {
    std::string name;
    std::string family;
    std::size_t n_features = 4;
    double loading_min = 0.6;
    double loading_max = 1.4;
    double noise_std = 2.6;
};

struct SynthConfig {
    std::size_t n_samples = 5000;
    std::int64_t cadence = 30;              // seconds between samples
    std::int64_t start_time = 1765497600;   // fixture epoch anchor
    std::vector<SynthSegmentConfig> segments;
    std::size_t n_residual = 20;
    double latent_persistence = 0.95;
    std::size_t fault_latent_index = 0;     // cumulative segment's latent
    double fault_threshold = 3.6;           // level on the designated latent
    std::int64_t fault_lead = 120;          // seconds from excursion to fault
    std::int64_t fault_refractory = 3300;   // min seconds between logged faults
    std::size_t planted_duplicates = 0;     // exact copies, one per leading segment
    std::uint64_t seed = 7;

    /// The default fixture: 6 segments x 4 features, 20 residual
    /// features, T=5000 at 30 s cadence, seed 7.
    static SynthConfig defaults();
};

struct SynthResult {
    MetricFrame frame;       // wide, native cadence
    FaultLog faults;
    SegmentTaxonomy taxonomy; // ground-truth segment map with patterns
};

/// Deterministic generator: per-segment AR(1) latents, loading-mixed
/// features with family-specific emission, independent residual
/// features, and faults logged fault_lead seconds after each
/// up-crossing of fault_threshold by the designated latent.
SynthResult generate_telemetry(const SynthConfig& config);

} // namespace semseg
