// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "semseg/ingest.hpp"
#include "semseg/prediction.hpp"
#include "semseg/pruning.hpp"
#include "semseg/separability.hpp"
#include "semseg/taxonomy.hpp"

namespace semseg {

/// All report serializers emit plain nlohmann::json objects, whose
/// keys serialize in sorted order; identical in-memory reports dump
/// to identical bytes.
nlohmann::json cleaning_summary_to_json(const CleaningSummary& summary);
nlohmann::json taxonomy_to_json(const SegmentTaxonomy& taxonomy);
nlohmann::json correlation_report_to_json(const CorrelationReport& report);
nlohmann::json shift_result_to_json(const ShiftTestResult& result);
nlohmann::json prune_result_to_json(const PruneResult& result);
nlohmann::json risk_report_to_json(const RiskReport& report);

/// dump(2) plus a trailing newline.
std::string dump_report(const nlohmann::json& doc);
void write_text_file(const std::string& path, const std::string& text);

/// Flat CSV emitters for external plotting.
void write_omega_csv(const CorrelationReport& report, const std::string& path);
void write_gap_csv(const RiskReport& report, const std::string& path);
void write_risk_auc_csv(const RiskReport& report, const std::string& path);
void write_condcorr_csv(const RiskReport& report, const std::string& path);
void write_risk_report_csv(const RiskReport& report, const std::string& path);

} // namespace semseg
