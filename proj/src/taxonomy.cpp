// SPDX-License-Identifier: Apache-2.0
#include "semseg/taxonomy.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "semseg/errors.hpp"

namespace semseg {

namespace {

const std::set<std::string> kTransformIds = {
    "MCR",        "LTC",        "BSR",         "NETRATE",   "GBD",
    "RBDR",       "RESID_NONE", "RESID_SQRT",  "RESID_LOG1P",
    "RESID_DIFF"};

const std::set<std::string> kNormalizationIds = {"ROBUST", "LOG1P",
                                                 "ZSCORE_COND", "NONE"};

SegmentRule parse_rule(const nlohmann::json& node) {
    SegmentRule rule;
    rule.name = node.at("name").get<std::string>();
    rule.transform = node.at("transform").get<std::string>();
    rule.normalization = node.at("normalization").get<std::string>();
    for (const auto& pattern : node.at("patterns"))
        rule.patterns.push_back(pattern.get<std::string>());
    return rule;
}

} // namespace

std::vector<std::string> SegmentedSpace::canonical_features() const {
    std::vector<std::string> out;
    for (const auto& [name, features] : canonical)
        out.insert(out.end(), features.begin(), features.end());
    return out;
}

std::vector<std::string> SegmentedSpace::residual_features() const {
    std::vector<std::string> out;
    for (const auto& [name, features] : residual)
        out.insert(out.end(), features.begin(), features.end());
    return out;
}

bool glob_match(const std::string& pattern, const std::string& text) {
    // Iterative matcher with star backtracking.
    std::size_t p = 0, t = 0;
    std::size_t star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() &&
            (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

void validate_taxonomy(const SegmentTaxonomy& taxonomy) {
    std::set<std::string> names;
    const auto check_rules = [&](const std::vector<SegmentRule>& rules,
                                 const char* kind) {
        for (const auto& rule : rules) {
            if (rule.name.empty())
                throw ConfigError(std::string(kind) + " with empty name");
            if (!names.insert(rule.name).second)
                throw ConfigError("duplicate segment name " + rule.name);
            if (!kTransformIds.count(rule.transform))
                throw ConfigError("unknown transform " + rule.transform);
            if (!kNormalizationIds.count(rule.normalization))
                throw ConfigError("unknown normalization " + rule.normalization);
        }
    };
    check_rules(taxonomy.canonical_segments, "canonical segment");
    check_rules(taxonomy.residual_families, "residual family");
}

SegmentTaxonomy parse_taxonomy_text(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("taxonomy JSON: ") + e.what());
    }
    SegmentTaxonomy taxonomy;
    try {
        for (const auto& node : doc.at("canonical"))
            taxonomy.canonical_segments.push_back(parse_rule(node));
        if (doc.contains("residual"))
            for (const auto& node : doc.at("residual"))
                taxonomy.residual_families.push_back(parse_rule(node));
        if (doc.contains("keep_list"))
            for (const auto& name : doc.at("keep_list"))
                taxonomy.keep_list.insert(name.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("taxonomy JSON: ") + e.what());
    }
    validate_taxonomy(taxonomy);
    return taxonomy;
}

SegmentTaxonomy parse_taxonomy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_taxonomy_text(text);
}

SegmentedSpace assign_segments(const MetricFrame& frame,
                               const SegmentTaxonomy& taxonomy) {
    std::vector<std::string> sorted_columns = frame.columns;
    std::sort(sorted_columns.begin(), sorted_columns.end());

    SegmentedSpace space;
    for (const auto& rule : taxonomy.canonical_segments)
        space.canonical.emplace_back(rule.name, std::vector<std::string>{});
    for (const auto& rule : taxonomy.residual_families)
        space.residual.emplace_back(rule.name, std::vector<std::string>{});

    const auto matches_rule = [](const SegmentRule& rule, const std::string& name) {
        return std::any_of(rule.patterns.begin(), rule.patterns.end(),
                           [&](const std::string& p) { return glob_match(p, name); });
    };

    for (const auto& column : sorted_columns) {
        bool placed = false;
        for (std::size_t i = 0; i < taxonomy.canonical_segments.size() && !placed; ++i) {
            if (matches_rule(taxonomy.canonical_segments[i], column)) {
                space.canonical[i].second.push_back(column);
                placed = true;
            }
        }
        for (std::size_t i = 0; i < taxonomy.residual_families.size() && !placed; ++i) {
            if (matches_rule(taxonomy.residual_families[i], column)) {
                space.residual[i].second.push_back(column);
                placed = true;
            }
        }
        if (!placed) space.unmatched.push_back(column);
    }

    if (space.canonical_features().empty())
        throw DataError("assign_segments: no column matched any canonical segment");
    return space;
}

} // namespace semseg
