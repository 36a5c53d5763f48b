#include "qmetric/io/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qmetric::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc())
        throw std::runtime_error("could not parse number: " + s);
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

std::string ensemble_to_json(const Ensemble& e) {
    json doc;
    doc["dim"] = e.dim();
    doc["kind"] = e.kind();
    json entries = json::array();
    for (const auto& entry : e.entries()) {
        json item;
        item["weight"] = entry.weight;
        json amps = json::array();
        for (const cplx& a : entry.state.amplitudes()) {
            amps.push_back(a.real());
            amps.push_back(a.imag());
        }
        item["amplitudes"] = std::move(amps);
        entries.push_back(std::move(item));
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

Ensemble ensemble_from_json(const std::string& text) {
    const json doc = json::parse(text);
    const int dim = doc.at("dim").get<int>();
    std::vector<Ensemble::Entry> entries;
    for (const json& item : doc.at("entries")) {
        const json& amps = item.at("amplitudes");
        if (int(amps.size()) != 2 * dim)
            throw std::runtime_error("ensemble JSON: amplitude length != 2*dim");
        std::vector<cplx> v(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i)
            v[std::size_t(i)] = cplx(amps[std::size_t(2 * i)].get<double>(),
                                     amps[std::size_t(2 * i + 1)].get<double>());
        entries.push_back({item.at("weight").get<double>(), PureState(std::move(v))});
    }
    return Ensemble(std::move(entries),
                    doc.value("kind", std::string{}));
}

void write_ensemble(const std::string& path, const Ensemble& e) {
    write_text_file(path, ensemble_to_json(e));
}

Ensemble read_ensemble(const std::string& path) {
    return ensemble_from_json(read_text_file(path));
}

void write_table_csv(const std::string& path, const FidelityTable& t) {
    std::ostringstream out;
    out << kCsvVersionLine << "\n";
    for (int j = 0; j < t.cols; ++j) out << (j ? "," : "") << "c" << j;
    out << "\n";
    for (int i = 0; i < t.rows; ++i) {
        for (int j = 0; j < t.cols; ++j)
            out << (j ? "," : "") << format_double(t.at(i, j));
        out << "\n";
    }
    write_text_file(path, out.str());
}

FidelityTable read_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    FidelityTable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // column-label row
            header_seen = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (t.cols == 0) t.cols = int(cells.size());
        if (int(cells.size()) != t.cols)
            throw std::runtime_error("ragged table row in " + path);
        for (const std::string& c : cells) t.values.push_back(parse_double(c));
        ++t.rows;
    }
    if (t.rows == 0) throw std::runtime_error("empty table in " + path);
    return t;
}

void write_batch_csv(const std::string& path, const SampleBatch& batch) {
    std::ostringstream out;
    out << kCsvVersionLine << "\n";
    out << "kind,i,j,r\n";
    for (const SampleRecord& rec : batch.records)
        out << pair_kind_name(rec.kind) << ',' << rec.i << ',' << rec.j << ','
            << int(rec.r) << "\n";
    write_text_file(path, out.str());
}

SampleBatch read_batch_csv(const std::string& path, int n1, int n2) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    SampleBatch batch;
    batch.n1 = n1;
    batch.n2 = n2;
    std::string line;
    bool header_seen = false;
    bool kind_set = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 4) throw std::runtime_error("bad batch row: " + line);
        const auto kind = parse_pair_kind(cells[0]);
        if (!kind) throw std::runtime_error("bad pair kind: " + cells[0]);
        if (!kind_set) {
            batch.kind = *kind;
            kind_set = true;
        }
        SampleRecord rec;
        rec.kind = *kind;
        rec.i = std::int32_t(std::stol(cells[1]));
        rec.j = std::int32_t(std::stol(cells[2]));
        const long r = std::stol(cells[3]);
        if (r != 1 && r != -1) throw std::runtime_error("bad outcome: " + cells[3]);
        rec.r = std::int8_t(r);
        if (rec.i < 0 || rec.i >= n1 || rec.j < 0 || rec.j >= n2)
            throw std::runtime_error("batch label out of range: " + line);
        batch.records.push_back(rec);
    }
    batch.budget = std::int64_t(batch.records.size());
    return batch;
}

void write_plan_csv(const std::string& path, const Coupling& plan) {
    std::ostringstream out;
    out << kCsvVersionLine << "\n";
    out << "i,j,mass\n";
    for (int i = 0; i < plan.n1; ++i)
        for (int j = 0; j < plan.n2; ++j) {
            const double mass = plan.at(i, j);
            if (mass > 1e-15)
                out << i << ',' << j << ',' << format_double(mass) << "\n";
        }
    write_text_file(path, out.str());
}

Coupling read_plan_csv(const std::string& path, int n1, int n2) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Coupling plan;
    plan.n1 = n1;
    plan.n2 = n2;
    plan.plan.assign(std::size_t(n1) * n2, 0.0);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 3) throw std::runtime_error("bad plan row: " + line);
        const int i = int(std::stol(cells[0]));
        const int j = int(std::stol(cells[1]));
        if (i < 0 || i >= n1 || j < 0 || j >= n2)
            throw std::runtime_error("plan entry out of range: " + line);
        plan.plan[std::size_t(i) * n2 + j] = parse_double(cells[2]);
    }
    return plan;
}

void write_curve_csv(const std::string& path, const ComplexityCurve& curve, int k) {
    std::ostringstream out;
    out << kCsvVersionLine << "\n";
    out << "metric,k,N,trial,M\n";
    for (const ComplexityPoint& p : curve.points)
        for (std::size_t t = 0; t < p.result.trials.size(); ++t) {
            const TrialOutcome& trial = p.result.trials[t];
            out << curve.metric_id << ',' << k << ',' << p.n << ',' << t << ','
                << (trial.ok ? trial.min_samples : -1) << "\n";
        }
    write_text_file(path, out.str());
}

namespace {

json diagnostics_json(const std::vector<KindDiagnostics>& diags) {
    json arr = json::array();
    for (const KindDiagnostics& d : diags) {
        json item;
        item["kind"] = d.kind;
        item["budget"] = d.budget;
        item["qualifying_labels"] = d.m;
        item["min_count"] = d.min_t;
        item["labels_dropped"] = d.labels_dropped;
        arr.push_back(std::move(item));
    }
    return arr;
}

}  // namespace

std::string distance_report_to_json(const DistanceReport& r) {
    json doc;
    doc["value"] = r.value;
    doc["raw"] = r.raw;
    doc["metric"] = r.metric_id;
    doc["route"] = r.route;
    if (r.f11) doc["f11"] = *r.f11;
    if (r.f22) doc["f22"] = *r.f22;
    if (r.f12) doc["f12"] = *r.f12;
    return doc.dump(2) + "\n";
}

std::string estimate_report_to_json(const EstimateReport& r) {
    json doc;
    doc["estimate"] = r.estimate;
    doc["metric"] = r.metric_id;
    doc["budget"] = r.budget_used;
    doc["kinds"] = diagnostics_json(r.per_kind);
    if (r.f11) doc["f11"] = *r.f11;
    if (r.f22) doc["f22"] = *r.f22;
    if (r.f12) doc["f12"] = *r.f12;
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qmetric::io
