#pragma once

#include <string>
#include <vector>

#include "qmetric/complexity/complexity.hpp"
#include "qmetric/ensembles/ensemble.hpp"
#include "qmetric/estimators/estimators.hpp"
#include "qmetric/metrics/metrics.hpp"
#include "qmetric/sampler/sampler.hpp"

namespace qmetric::io {

inline constexpr const char* kCsvVersionLine = "# qmetric-lab v1";

// Shortest round-trip decimal form (locale-independent).
std::string format_double(double v);

// Ensemble JSON: {dim, entries: [{weight, amplitudes: [re, im, ...]}], kind}
std::string ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(const std::string& text);
void write_ensemble(const std::string& path, const Ensemble& e);
Ensemble read_ensemble(const std::string& path);

// Fidelity/cost tables as CSV with a header row of column labels.
void write_table_csv(const std::string& path, const FidelityTable& t);
FidelityTable read_table_csv(const std::string& path);

// Batch CSV: one record per row, columns kind,i,j,r.
void write_batch_csv(const std::string& path, const SampleBatch& batch);
SampleBatch read_batch_csv(const std::string& path, int n1, int n2);

// Transport plans as sparse triples: columns i,j,mass (entries above 1e-15).
void write_plan_csv(const std::string& path, const Coupling& plan);
Coupling read_plan_csv(const std::string& path, int n1, int n2);

// Curve CSV: columns metric,k,N,trial,M (failed trials get M = -1).
void write_curve_csv(const std::string& path, const ComplexityCurve& curve, int k);

std::string distance_report_to_json(const DistanceReport& r);
std::string estimate_report_to_json(const EstimateReport& r);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace qmetric::io
