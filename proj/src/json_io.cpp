// SPDX-License-Identifier: Apache-2.0
#include "semseg/json_io.hpp"

#include <cstdio>
#include <fstream>

#include "semseg/errors.hpp"

namespace semseg {

namespace {

std::string csv_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return shorter;
    }
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

} // namespace

nlohmann::json cleaning_summary_to_json(const CleaningSummary& summary) {
    nlohmann::json dropped = nlohmann::json::array();
    for (const auto& d : summary.dropped)
        dropped.push_back({{"column", d.name}, {"reason", d.reason}});
    return {{"dropped", dropped}, {"filled_cells", summary.filled_cells}};
}

nlohmann::json taxonomy_to_json(const SegmentTaxonomy& taxonomy) {
    const auto rules_to_json = [](const std::vector<SegmentRule>& rules) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& rule : rules)
            out.push_back({{"name", rule.name},
                           {"transform", rule.transform},
                           {"normalization", rule.normalization},
                           {"patterns", rule.patterns}});
        return out;
    };
    return {{"canonical", rules_to_json(taxonomy.canonical_segments)},
            {"residual", rules_to_json(taxonomy.residual_families)},
            {"keep_list", taxonomy.keep_list}};
}

nlohmann::json correlation_report_to_json(const CorrelationReport& report) {
    nlohmann::json per_segment = nlohmann::json::object();
    for (const auto& [name, entry] : report.per_segment_icc)
        per_segment[name] = {{"icc", entry.icc}, {"n_pairs", entry.n_pairs}};

    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [key, entry] : report.icor_pairs) {
        nlohmann::json pair = {{"segment_a", key.first},
                               {"segment_b", key.second},
                               {"icor", entry.icor},
                               {"n_pairs", entry.n_pairs}};
        const auto median_it = report.icor_pair_medians.find(key);
        if (median_it != report.icor_pair_medians.end())
            pair["median"] = median_it->second;
        pairs.push_back(std::move(pair));
    }

    nlohmann::json doc = {{"icc_micro", report.icc_micro},
                          {"icc_macro", report.icc_macro},
                          {"per_segment_icc", per_segment},
                          {"icor_pairs", pairs},
                          {"omega_in_count", report.omega_in.size()},
                          {"omega_out_count", report.omega_out.size()},
                          {"skipped_constant_features", report.skipped_constant_features},
                          {"excluded_segments", report.excluded_segments},
                          {"partial", report.partial}};
    if (report.icor_micro) doc["icor_micro"] = *report.icor_micro;
    if (report.icor_macro) doc["icor_macro"] = *report.icor_macro;
    if (report.delta) doc["delta"] = *report.delta;
    if (report.utest)
        doc["utest"] = {{"u", report.utest->u},
                        {"p", report.utest->p_value},
                        {"n_in", report.utest->n_in},
                        {"n_out", report.utest->n_out},
                        {"exact", report.utest->exact}};
    return doc;
}

nlohmann::json shift_result_to_json(const ShiftTestResult& result) {
    return {{"icc_shift", result.icc_shift},
            {"icor_shift", result.icor_shift},
            {"per_repeat_icc", result.per_repeat_icc},
            {"per_repeat_icor", result.per_repeat_icor}};
}

nlohmann::json prune_result_to_json(const PruneResult& result) {
    nlohmann::json retained = nlohmann::json::object();
    for (const auto& [segment, features] : result.retained)
        retained[segment] = features;

    nlohmann::json removed = nlohmann::json::object();
    for (const auto& [segment, list] : result.removed) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& r : list)
            entries.push_back({{"feature", r.feature},
                               {"reason", r.reason},
                               {"partner", r.partner},
                               {"rho", r.rho}});
        removed[segment] = std::move(entries);
    }

    nlohmann::json mst = nlohmann::json::object();
    for (const auto& [segment, edges] : result.mst_edges) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& edge : edges)
            list.push_back({{"a", edge.a},
                            {"b", edge.b},
                            {"weight", edge.weight},
                            {"rho", edge.rho}});
        mst[segment] = std::move(list);
    }

    return {{"tau_red", result.tau_red},
            {"retained", retained},
            {"removed", removed},
            {"mst_edges", mst},
            {"pre_report", correlation_report_to_json(result.pre_report)},
            {"post_report", correlation_report_to_json(result.post_report)},
            {"icc_micro_delta", result.icc_micro_delta},
            {"icor_micro_delta", result.icor_micro_delta}};
}

namespace {

nlohmann::json conditional_stats_to_json(const ConditionalStats& stats) {
    nlohmann::json doc = {{"theta_c", stats.theta_c},
                          {"covariance", stats.covariance},
                          {"n", stats.n}};
    if (stats.correlation) doc["correlation"] = *stats.correlation;
    return doc;
}

} // namespace

nlohmann::json risk_report_to_json(const RiskReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : report.cells) {
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& fm : cell.folds) {
            nlohmann::json fold = {{"fold", fm.fold},
                                   {"risk", fm.risk},
                                   {"baseline_risk", fm.baseline_risk},
                                   {"degenerate", fm.degenerate},
                                   {"n_train", fm.n_train},
                                   {"n_test", fm.n_test},
                                   {"n_test_pos", fm.n_test_pos}};
            if (fm.auc) fold["auc"] = *fm.auc;
            folds.push_back(std::move(fold));
        }
        nlohmann::json entry = {{"representation", cell.key.representation},
                                {"model", cell.key.model},
                                {"n_splits", cell.key.n_splits},
                                {"delta", cell.key.delta},
                                {"window", cell.key.window},
                                {"risk", cell.risk},
                                {"baseline_risk", cell.baseline_risk},
                                {"folds", folds}};
        if (cell.auc) entry["auc"] = *cell.auc;
        cells.push_back(std::move(entry));
    }

    nlohmann::json gaps = nlohmann::json::array();
    for (const auto& gap : report.gaps)
        gaps.push_back({{"model", gap.model},
                        {"n_splits", gap.n_splits},
                        {"delta", gap.delta},
                        {"window", gap.window},
                        {"delta_gap", gap.delta_gap},
                        {"per_fold_gap", gap.per_fold_gap}});

    nlohmann::json conditional = nlohmann::json::array();
    for (const auto& cond : report.conditional) {
        nlohmann::json per_fold = nlohmann::json::array();
        for (const auto& stats : cond.per_fold)
            per_fold.push_back(conditional_stats_to_json(stats));
        nlohmann::json entry = {{"model", cond.model},
                                {"n_splits", cond.n_splits},
                                {"delta", cond.delta},
                                {"window", cond.window},
                                {"mean_covariance", cond.mean_covariance},
                                {"per_fold", per_fold}};
        if (cond.mean_correlation) entry["mean_correlation"] = *cond.mean_correlation;
        conditional.push_back(std::move(entry));
    }

    nlohmann::json paired = nlohmann::json::array();
    for (const auto& p : report.paired)
        paired.push_back({{"representation", p.representation},
                          {"mean_diff", p.mean_diff},
                          {"n_folds", p.n_folds},
                          {"n_positive", p.n_positive},
                          {"sign_test_p", p.sign_test_p}});

    return {{"cells", cells},
            {"gaps", gaps},
            {"conditional", conditional},
            {"paired", paired},
            {"representations", report.representations},
            {"theta_quantile", report.theta_quantile},
            {"seed", report.seed},
            {"class_weighting", report.class_weighting},
            {"faults_out_of_range", report.faults_out_of_range},
            {"warnings", report.warnings}};
}

std::string dump_report(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

void write_omega_csv(const CorrelationReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "set,rho\n";
    for (double rho : report.omega_in) out << "omega_in," << csv_double(rho) << '\n';
    for (double rho : report.omega_out) out << "omega_out," << csv_double(rho) << '\n';
}

void write_gap_csv(const RiskReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "model,n_splits,delta,window,delta_gap\n";
    for (const auto& gap : report.gaps)
        out << gap.model << ',' << gap.n_splits << ',' << gap.delta << ','
            << gap.window << ',' << csv_double(gap.delta_gap) << '\n';
}

void write_risk_auc_csv(const RiskReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "representation,model,n_splits,delta,window,risk,auc,baseline_risk\n";
    for (const auto& cell : report.cells) {
        out << cell.key.representation << ',' << cell.key.model << ','
            << cell.key.n_splits << ',' << cell.key.delta << ',' << cell.key.window
            << ',' << csv_double(cell.risk) << ',';
        if (cell.auc) out << csv_double(*cell.auc);
        out << ',' << csv_double(cell.baseline_risk) << '\n';
    }
}

void write_condcorr_csv(const RiskReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "model,n_splits,delta,window,fold,covariance,correlation,n\n";
    for (const auto& cond : report.conditional) {
        for (std::size_t f = 0; f < cond.per_fold.size(); ++f) {
            const auto& stats = cond.per_fold[f];
            out << cond.model << ',' << cond.n_splits << ',' << cond.delta << ','
                << cond.window << ',' << f + 1 << ',' << csv_double(stats.covariance)
                << ',';
            if (stats.correlation) out << csv_double(*stats.correlation);
            out << ',' << stats.n << '\n';
        }
    }
}

void write_risk_report_csv(const RiskReport& report, const std::string& path) {
    write_risk_auc_csv(report, path);
}

} // namespace semseg
