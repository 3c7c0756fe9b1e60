#include "lmfg/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lmfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, int row, const char* what) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("row " + std::to_string(row) + ": bad " +
                                    what + " '" + s + "'");
    }
    if (pos != s.size())
        throw std::invalid_argument("row " + std::to_string(row) + ": bad " +
                                    what + " '" + s + "'");
    return x;
}

int parse_prediction(const std::string& s, int row) {
    if (s == "1" || s == "+1" || s == "yes" || s == "YES") return +1;
    if (s == "-1" || s == "no" || s == "NO") return -1;
    throw std::invalid_argument("row " + std::to_string(row) +
                                ": prediction must be one of -1, 1, yes, no, YES, NO (got '" +
                                s + "')");
}

} // namespace

PredictionSet ingest(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("ingest: empty file");
    auto header = split_csv(line);
    static const char* coord_names[3] = {"x", "y", "z"};
    if (header.size() < 3 || header.size() > 6 || header[0] != "agent_id" ||
        header[1] != "prediction" || header[2] != "quality")
        throw std::invalid_argument(
            "ingest: header must be agent_id,prediction,quality[,x,y[,z]]");
    std::size_t ncoord = header.size() - 3;
    for (std::size_t c = 0; c < ncoord; ++c)
        if (header[3 + c] != coord_names[c])
            throw std::invalid_argument(
                "ingest: coordinate columns must be x, y, z in order");

    PredictionSet set;
    set.has_positions = ncoord > 0;
    std::set<long> seen;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw std::invalid_argument("row " + std::to_string(row) +
                                        ": expected " + std::to_string(header.size()) +
                                        " fields, got " + std::to_string(fields.size()));
        PredictionRecord rec;
        rec.agent_id = static_cast<long>(parse_double(fields[0], row, "agent_id"));
        rec.prediction = parse_prediction(fields[1], row);
        rec.quality = parse_double(fields[2], row, "quality");
        if (!(rec.quality > 0.0 && rec.quality <= 1.0))
            throw std::invalid_argument("row " + std::to_string(row) +
                                        ": quality must lie in (0, 1]");
        if (!seen.insert(rec.agent_id).second)
            throw std::invalid_argument("duplicate agent_id " +
                                        std::to_string(rec.agent_id) + " at row " +
                                        std::to_string(row));
        for (std::size_t c = 0; c < ncoord; ++c)
            rec.position.push_back(parse_double(fields[3 + c], row, coord_names[c]));
        set.records.push_back(std::move(rec));
    }
    if (set.records.empty()) throw std::invalid_argument("ingest: no data rows");
    return set;
}

PredictionSet ingest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("ingest: cannot open " + path);
    return ingest(in);
}

EmbeddedSystem embed(const PredictionSet& preds, const GeometrySpec& geometry_spec,
                     double beta, const QualityMap& mapping) {
    const int n_rec = static_cast<int>(preds.records.size());
    GeometrySpec spec = geometry_spec;
    if (spec.kind != GeometryKind::euclidean_lattice && spec.n_agents == 0)
        spec.n_agents = n_rec;

    EmbeddedSystem sys;
    sys.geometry = build_geometry(spec);
    const int n = sys.geometry.size();
    if (n < n_rec)
        throw std::invalid_argument("embed: geometry has " + std::to_string(n) +
                                    " sites for " + std::to_string(n_rec) + " predictions");

    // extra sites default to weak followers with alternating signs
    sys.sigma.assign(n, 0);
    sys.strengths.p.assign(n, 1e-12);
    sys.strengths.s.assign(n, 1e-12);
    sys.strengths.beta = beta;
    for (int i = 0; i < n; ++i)
        sys.sigma[i] = static_cast<std::int8_t>(i % 2 == 0 ? +1 : -1);

    auto map_quality = [&](double q) {
        double v = mapping ? mapping(q) : q;
        if (!(v > 0.0))
            throw std::invalid_argument("embed: quality mapping produced a non-positive strength");
        return v;
    };

    if (preds.has_positions) {
        if (!sys.geometry.spatial())
            throw std::invalid_argument("embed: predictions carry positions but geometry is not spatial");
        std::set<long> used;
        for (const auto& rec : preds.records) {
            if (rec.position.size() != sys.geometry.dims.size())
                throw std::invalid_argument("embed: position dimensionality mismatch for agent " +
                                            std::to_string(rec.agent_id));
            long idx = 0;
            for (std::size_t a = 0; a < rec.position.size(); ++a) {
                long c = std::lround(rec.position[a]);
                if (c < 0 || c >= sys.geometry.dims[a])
                    throw std::invalid_argument("embed: position out of the lattice for agent " +
                                                std::to_string(rec.agent_id));
                idx = idx * sys.geometry.dims[a] + c;
            }
            if (!used.insert(idx).second)
                throw std::invalid_argument("embed: two predictions map to the same lattice site");
            sys.sigma[idx] = static_cast<std::int8_t>(rec.prediction);
            double st = map_quality(rec.quality);
            sys.strengths.p[idx] = st;
            sys.strengths.s[idx] = st;
        }
    } else {
        std::vector<int> order(n_rec);
        for (int i = 0; i < n_rec; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return preds.records[a].agent_id < preds.records[b].agent_id;
        });
        for (int k = 0; k < n_rec; ++k) {
            const auto& rec = preds.records[order[k]];
            sys.sigma[k] = static_cast<std::int8_t>(rec.prediction);
            double st = map_quality(rec.quality);
            sys.strengths.p[k] = st;
            sys.strengths.s[k] = st;
        }
    }
    double mp = 0.0, ms = 0.0;
    for (int i = 0; i < n; ++i) {
        mp += sys.strengths.p[i];
        ms += sys.strengths.s[i];
    }
    sys.strengths.norm = (mp + ms) / n;
    return sys;
}

std::string to_string(Decision d) {
    switch (d) {
        case Decision::yes: return "yes";
        case Decision::no: return "no";
        case Decision::tie: return "tie";
    }
    return "?";
}

ConsensusResult consensus(AgentSystem& system, const NoiseModel& noise,
                          long max_steps, int threads) {
    if (max_steps < 1) throw std::invalid_argument("consensus: max_steps must be >= 1");
    Trajectory traj = run(system, noise, max_steps, 0, threads);

    ConsensusResult res;
    res.steps_to_stationarity = traj.steps_run;
    res.converged = traj.end != RunEnd::completed;
    res.two_cycle = traj.end == RunEnd::two_cycle;
    double m = traj.m.back();
    if (res.two_cycle) // average the two alternating states
        m = 0.5 * (traj.m[traj.m.size() - 1] + traj.m[traj.m.size() - 2]);
    res.m_final = m;
    res.p_yes = (1.0 + m) / 2.0;
    res.p_no = 1.0 - res.p_yes;
    res.decision = m > 0.0 ? Decision::yes : m < 0.0 ? Decision::no : Decision::tie;

    int majority = m >= 0.0 ? +1 : -1;
    ClusterReport all = detect_clusters(system.sigma, *system.geometry);
    res.minority.labels = all.labels;
    for (const Cluster& c : all.clusters) {
        if (c.sign == majority) continue;
        res.minority_agents += c.size;
        res.minority.clusters.push_back(c);
    }
    return res;
}

} // namespace lmfg
