// SPDX-License-Identifier: Apache-2.0
#include "semseg/synth.hpp"

#include <algorithm>
#include <cmath>

#include "semseg/errors.hpp"
#include "semseg/rng.hpp"

namespace semseg {

SynthConfig SynthConfig::defaults() {
    SynthConfig config;
    config.segments = {
        {"cumulative", "counter", 4, 0.6, 1.4, 2.6},
        {"latency", "latency", 4, 0.6, 1.4, 2.6},
        {"pressure", "pressure", 4, 0.6, 1.4, 2.6},
        {"network", "counter", 4, 0.6, 1.4, 2.6},
        {"state", "state", 4, 0.6, 1.4, 2.6},
        {"structural", "structural", 4, 0.6, 1.4, 2.6},
    };
    return config;
}

namespace {

void validate_config(const SynthConfig& config) {
    if (config.n_samples < 100)
        throw ConfigError("synth: n_samples must be >= 100");
    if (config.cadence < 1) throw ConfigError("synth: cadence must be >= 1");
    if (config.segments.empty()) throw ConfigError("synth: need segments");
    for (const auto& segment : config.segments) {
        if (segment.n_features < 1)
            throw ConfigError("synth: each segment needs features");
        if (segment.loading_min > segment.loading_max || segment.loading_min <= 0.0)
            throw ConfigError("synth: bad loading range for " + segment.name);
        if (segment.noise_std < 0.0)
            throw ConfigError("synth: negative noise_std for " + segment.name);
    }
    if (config.latent_persistence < 0.0 || config.latent_persistence >= 1.0)
        throw ConfigError("synth: latent_persistence must lie in [0, 1)");
    if (config.fault_latent_index >= config.segments.size())
        throw ConfigError("synth: fault_latent_index out of range");
    if (config.fault_lead < 0) throw ConfigError("synth: fault_lead must be >= 0");
    if (config.fault_refractory < 0)
        throw ConfigError("synth: fault_refractory must be >= 0");
    if (config.planted_duplicates > config.segments.size())
        throw ConfigError("synth: more duplicates than segments");
}

std::string feature_name(const std::string& segment, std::size_t index) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02zu", index);
    return "synth_" + segment + "_" + buf;
}

/// Emission per family; each maps the latent-plus-noise signal into
/// the value range handled by that segment's transform.
std::vector<double> emit_feature(const std::string& family,
                                 const std::vector<double>& signal) {
    const std::size_t T = signal.size();
    std::vector<double> out(T);
    if (family == "counter") {
        // Cumulative counter; base rate keeps increments positive so
        // the difference transforms recover the signal exactly.
        double level = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            level += std::max(0.0, 40.0 + signal[t]);
            out[t] = level;
        }
    } else if (family == "latency") {
        for (std::size_t t = 0; t < T; ++t) out[t] = std::exp(0.3 * signal[t]);
    } else if (family == "pressure") {
        for (std::size_t t = 0; t < T; ++t) out[t] = 50.0 + signal[t];
    } else if (family == "state") {
        for (std::size_t t = 0; t < T; ++t) out[t] = 1000.0 + 5.0 * signal[t];
    } else if (family == "structural") {
        for (std::size_t t = 0; t < T; ++t) out[t] = 200.0 + 2.0 * signal[t];
    } else {
        throw ConfigError("synth: unknown segment family " + family);
    }
    return out;
}

struct ResidualFamily {
    std::string name;
    std::string transform;
    std::string normalization;
};

const std::vector<ResidualFamily> kResidualFamilies = {
    {"ratio", "RESID_SQRT", "ZSCORE_COND"},
    {"size", "RESID_LOG1P", "ROBUST"},
    {"weak", "RESID_DIFF", "NONE"},
    {"monitoring", "RESID_NONE", "NONE"},
};

std::vector<double> emit_residual(const std::string& family, std::size_t T, Rng& rng) {
    std::vector<double> out(T);
    if (family == "ratio") {
        // Bounded in [0, 1]; square of a uniform draw.
        for (auto& v : out) {
            const double u = rng.uniform01();
            v = u * u;
        }
    } else if (family == "size") {
        // Heavy-tailed nonnegative volume.
        for (auto& v : out) v = std::exp(1.5 * rng.normal());
    } else if (family == "weak") {
        for (auto& v : out) v = rng.normal();
    } else { // monitoring
        for (auto& v : out) v = 20.0 + 3.0 * rng.normal();
    }
    return out;
}

std::pair<std::string, std::string> transform_for(const SynthSegmentConfig& segment) {
    if (segment.family == "counter") {
        // Counters feed either the per-interval or per-second rate
        // transform; the network segment uses the timestamped one.
        if (segment.name == "network") return {"NETRATE", "NONE"};
        return {"MCR", "ROBUST"};
    }
    if (segment.family == "latency") return {"LTC", "ROBUST"};
    if (segment.family == "pressure") return {"BSR", "LOG1P"};
    if (segment.family == "state") return {"GBD", "NONE"};
    if (segment.family == "structural") return {"RBDR", "NONE"};
    throw ConfigError("synth: unknown segment family " + segment.family);
}

} // namespace

SynthResult generate_telemetry(const SynthConfig& config) {
    validate_config(config);
    const std::size_t T = config.n_samples;
    const double phi = config.latent_persistence;
    const double stationary_sd = 1.0 / std::sqrt(1.0 - phi * phi);

    Rng root(config.seed);
    Rng latent_stream = root.fork(1);
    Rng loading_stream = root.fork(2);
    Rng noise_stream = root.fork(3);
    Rng residual_stream = root.fork(4);

    SynthResult result;
    result.frame.timestamps.resize(T);
    for (std::size_t t = 0; t < T; ++t)
        result.frame.timestamps[t] =
            config.start_time + static_cast<std::int64_t>(t) * config.cadence;

    std::vector<std::vector<double>> latents(config.segments.size());
    for (std::size_t i = 0; i < config.segments.size(); ++i) {
        Rng rng = latent_stream.fork(i);
        auto& latent = latents[i];
        latent.resize(T);
        latent[0] = stationary_sd * rng.normal();
        for (std::size_t t = 1; t < T; ++t)
            latent[t] = phi * latent[t - 1] + rng.normal();
    }

    for (std::size_t i = 0; i < config.segments.size(); ++i) {
        const auto& segment = config.segments[i];
        const auto [transform, normalization] = transform_for(segment);
        SegmentRule rule{segment.name, transform, normalization,
                         {"synth_" + segment.name + "_*"}};
        result.taxonomy.canonical_segments.push_back(std::move(rule));

        std::vector<std::vector<double>> columns;
        for (std::size_t j = 0; j < segment.n_features; ++j) {
            Rng loading_rng = loading_stream.fork(i * 1000 + j);
            Rng noise_rng = noise_stream.fork(i * 1000 + j);
            const double loading =
                segment.loading_min +
                (segment.loading_max - segment.loading_min) * loading_rng.uniform01();
            std::vector<double> signal(T);
            for (std::size_t t = 0; t < T; ++t)
                signal[t] = loading * latents[i][t] +
                            segment.noise_std * noise_rng.normal();
            columns.push_back(emit_feature(segment.family, signal));
        }
        if (i < config.planted_duplicates)
            columns.push_back(columns.front()); // exact copy, |rho| = 1

        for (std::size_t j = 0; j < columns.size(); ++j) {
            const std::string name =
                j < segment.n_features
                    ? feature_name(segment.name, j)
                    : "synth_" + segment.name + "_dup";
            result.frame.columns.push_back(name);
            result.frame.values.push_back(std::move(columns[j]));
        }
    }

    const std::size_t per_family =
        (config.n_residual + kResidualFamilies.size() - 1) / kResidualFamilies.size();
    std::size_t emitted = 0;
    for (std::size_t f = 0; f < kResidualFamilies.size(); ++f) {
        const auto& family = kResidualFamilies[f];
        SegmentRule rule{family.name, family.transform, family.normalization,
                         {"synth_" + family.name + "_*"}};
        result.taxonomy.residual_families.push_back(std::move(rule));
        for (std::size_t j = 0; j < per_family && emitted < config.n_residual;
             ++j, ++emitted) {
            Rng rng = residual_stream.fork(f * 1000 + j);
            result.frame.columns.push_back(feature_name(family.name, j));
            result.frame.values.push_back(emit_residual(family.name, T, rng));
        }
    }

    result.frame.validate();

    // Up-crossings of the designated latent trigger faults; crossings
    // within the refractory window of the last logged fault count as
    // the same incident and are absorbed.
    const auto& fault_latent = latents[config.fault_latent_index];
    std::int64_t last_crossing = 0;
    bool any_fault = false;
    for (std::size_t t = 1; t < T; ++t) {
        if (fault_latent[t] > config.fault_threshold &&
            fault_latent[t - 1] <= config.fault_threshold) {
            std::int64_t now = result.frame.timestamps[t];
            if (any_fault && now - last_crossing < config.fault_refractory)
                continue;
            FaultEvent event;
            event.timestamp = now + config.fault_lead;
            event.magnitude =
                std::round((fault_latent[t] - config.fault_threshold) * 10.0) / 10.0;
            result.faults.events.push_back(event);
            last_crossing = now;
            any_fault = true;
        }
    }
    return result;
}

} // namespace semseg
