#include "lmfg/config.hpp"

#include "lmfg/analysis.hpp"
#include "lmfg/io.hpp"
#include "lmfg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lmfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& msg) {
    throw ConfigError("config key '" + key + "': " + msg);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        bad(key, "expected a number, got '" + v + "'");
    }
    if (pos != v.size()) bad(key, "expected a number, got '" + v + "'");
    return x;
}

long to_long(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long x;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        bad(key, "expected an integer, got '" + v + "'");
    }
    if (pos != v.size()) bad(key, "expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long x;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        bad(key, "expected a nonnegative integer, got '" + v + "'");
    }
    if (pos != v.size()) bad(key, "expected a nonnegative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad(key, "expected true/false, got '" + v + "'");
}

std::vector<int> to_dims(const std::string& key, const std::string& v) {
    std::vector<int> dims;
    std::string tok;
    std::stringstream ss(v);
    char sep = v.find('x') != std::string::npos ? 'x' : ',';
    while (std::getline(ss, tok, sep)) {
        tok = trim(tok);
        long d = to_long(key, tok);
        if (d <= 0) bad(key, "axis sizes must be positive");
        dims.push_back(static_cast<int>(d));
    }
    if (dims.empty() || dims.size() > 3) bad(key, "expected 1 to 3 axis sizes");
    return dims;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "mode",
        "geometry.kind", "geometry.dims", "geometry.radius", "geometry.boundary",
        "geometry.n_agents", "geometry.connect_prob", "geometry.seed",
        "geometry.branching", "geometry.depth", "geometry.coupling", "geometry.ultra_base",
        "disorder.dist", "disorder.value", "disorder.lo", "disorder.hi",
        "disorder.mu", "disorder.sigma", "disorder.self_esteem", "disorder.beta",
        "init.class", "init.sign", "init.m0", "init.layout",
        "dynamics.steps", "dynamics.snapshot_every",
        "dynamics.noise", "dynamics.noise_dist", "dynamics.noise_amplitude",
        "dynamics.gamma", "dynamics.alpha", "dynamics.dt", "dynamics.t_end",
        "dynamics.conv_tol", "dynamics.record_every",
        "field.dims", "field.dx", "field.boundary",
        "field.f.kind", "field.f.value", "field.f.lo", "field.f.hi",
        "field.f.offset", "field.f.slope", "field.f.smooth_passes",
        "field.f.disk_radius", "field.f.inside_value",
        "field.init.kind", "field.init.value", "field.init.lo", "field.init.hi",
        "field.init.disk_radius",
        "seeds.disorder", "seeds.noise", "seeds.init", "seeds.field",
        "analysis.eta_dense", "analysis.eta_sparse",
        "consensus.predictions", "consensus.max_steps",
        "analyze.f", "analyze.state",
        "sweep.target", "sweep.axes",
    };
    return keys;
}

} // namespace

std::string to_string(Mode m) {
    switch (m) {
        case Mode::ca: return "ca";
        case Mode::pde: return "pde";
        case Mode::analyze: return "analyze";
        case Mode::consensus: return "consensus";
        case Mode::sweep: return "sweep";
    }
    return "?";
}

KeyValueMap read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    KeyValueMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        if (map.count(key))
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        map[key] = value;
    }
    return map;
}

ExperimentConfig parse_config_map(const KeyValueMap& raw) {
    // unknown keys are errors; sweep.values.<axis> keys are dynamic
    for (const auto& [k, v] : raw) {
        if (k.rfind("sweep.values.", 0) == 0) continue;
        if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = raw.find(k);
        return it == raw.end() ? nullptr : &it->second;
    };

    ExperimentConfig cfg;
    if (const auto* v = get("mode")) {
        if (*v == "ca") cfg.mode = Mode::ca;
        else if (*v == "pde") cfg.mode = Mode::pde;
        else if (*v == "analyze") cfg.mode = Mode::analyze;
        else if (*v == "consensus") cfg.mode = Mode::consensus;
        else if (*v == "sweep") cfg.mode = Mode::sweep;
        else bad("mode", "expected ca|pde|analyze|consensus|sweep");
    }

    if (const auto* v = get("geometry.kind")) {
        if (*v == "euclidean_lattice") cfg.geometry.kind = GeometryKind::euclidean_lattice;
        else if (*v == "fully_connected") cfg.geometry.kind = GeometryKind::fully_connected;
        else if (*v == "ultrametric") cfg.geometry.kind = GeometryKind::ultrametric;
        else if (*v == "random_dilution") cfg.geometry.kind = GeometryKind::random_dilution;
        else bad("geometry.kind", "expected euclidean_lattice|fully_connected|ultrametric|random_dilution");
    }
    if (const auto* v = get("geometry.dims")) cfg.geometry.dims = to_dims("geometry.dims", *v);
    if (const auto* v = get("geometry.radius")) cfg.geometry.radius = to_double("geometry.radius", *v);
    if (const auto* v = get("geometry.boundary")) {
        if (*v == "periodic") cfg.geometry.boundary = Boundary::periodic;
        else if (*v == "open") cfg.geometry.boundary = Boundary::open;
        else bad("geometry.boundary", "expected periodic|open");
    }
    if (const auto* v = get("geometry.n_agents")) {
        long n = to_long("geometry.n_agents", *v);
        if (n <= 0) bad("geometry.n_agents", "must be positive");
        cfg.geometry.n_agents = static_cast<int>(n);
    }
    if (const auto* v = get("geometry.connect_prob")) {
        cfg.geometry.connect_prob = to_double("geometry.connect_prob", *v);
        if (!(cfg.geometry.connect_prob > 0.0 && cfg.geometry.connect_prob <= 1.0))
            bad("geometry.connect_prob", "must lie in (0, 1]");
    }
    if (const auto* v = get("geometry.seed")) cfg.geometry.seed = to_seed("geometry.seed", *v);
    if (const auto* v = get("geometry.branching")) {
        long b = to_long("geometry.branching", *v);
        if (b < 2) bad("geometry.branching", "must be >= 2");
        cfg.geometry.branching = static_cast<int>(b);
    }
    if (const auto* v = get("geometry.depth")) {
        long d = to_long("geometry.depth", *v);
        if (d < 1) bad("geometry.depth", "must be >= 1");
        cfg.geometry.depth = static_cast<int>(d);
    }
    if (const auto* v = get("geometry.coupling")) {
        cfg.geometry.coupling = to_double("geometry.coupling", *v);
        if (!(cfg.geometry.coupling > 0.0)) bad("geometry.coupling", "must be positive");
    }
    if (const auto* v = get("geometry.ultra_base")) {
        cfg.geometry.ultra_base = to_double("geometry.ultra_base", *v);
        if (!(cfg.geometry.ultra_base > 1.0)) bad("geometry.ultra_base", "must exceed 1");
    }
    if (cfg.geometry.kind == GeometryKind::euclidean_lattice &&
        !cfg.geometry.dims.empty()) {
        if (!(cfg.geometry.radius > 0.0)) bad("geometry.radius", "must be positive");
        int min_dim = *std::min_element(cfg.geometry.dims.begin(), cfg.geometry.dims.end());
        if (cfg.geometry.boundary == Boundary::periodic &&
            cfg.geometry.radius >= 0.5 * min_dim)
            bad("geometry.radius",
                "interaction radius must stay below half the smallest periodic axis");
    }

    if (const auto* v = get("disorder.dist")) {
        if (*v == "constant") cfg.disorder.dist = DisorderDist::constant;
        else if (*v == "uniform") cfg.disorder.dist = DisorderDist::uniform;
        else if (*v == "lognormal") cfg.disorder.dist = DisorderDist::lognormal;
        else bad("disorder.dist", "expected constant|uniform|lognormal");
    }
    if (const auto* v = get("disorder.value")) {
        cfg.disorder.value = to_double("disorder.value", *v);
        if (!(cfg.disorder.value > 0.0)) bad("disorder.value", "must be positive");
    }
    if (const auto* v = get("disorder.lo")) cfg.disorder.lo = to_double("disorder.lo", *v);
    if (const auto* v = get("disorder.hi")) cfg.disorder.hi = to_double("disorder.hi", *v);
    if (cfg.disorder.dist == DisorderDist::uniform &&
        !(cfg.disorder.lo > 0.0 && cfg.disorder.lo < cfg.disorder.hi))
        bad("disorder.lo", "uniform disorder requires 0 < lo < hi");
    if (const auto* v = get("disorder.mu")) cfg.disorder.mu = to_double("disorder.mu", *v);
    if (const auto* v = get("disorder.sigma")) {
        cfg.disorder.sigma = to_double("disorder.sigma", *v);
        if (cfg.disorder.sigma < 0.0) bad("disorder.sigma", "must be >= 0");
    }
    if (const auto* v = get("disorder.self_esteem"))
        cfg.disorder.self_esteem = to_bool("disorder.self_esteem", *v);
    if (const auto* v = get("disorder.beta")) {
        cfg.disorder.beta = to_double("disorder.beta", *v);
        if (cfg.disorder.beta < 0.0) bad("disorder.beta", "must be >= 0");
    }

    if (const auto* v = get("init.class")) {
        if (*v == "uniform") cfg.init.cls = InitClass::uniform;
        else if (*v == "mixed") cfg.init.cls = InitClass::mixed;
        else if (*v == "critical") cfg.init.cls = InitClass::critical;
        else bad("init.class", "expected uniform|mixed|critical");
    }
    if (const auto* v = get("init.sign")) {
        long s = to_long("init.sign", *v);
        if (s != 1 && s != -1) bad("init.sign", "must be +1 or -1");
        cfg.init.sign = static_cast<int>(s);
    }
    if (const auto* v = get("init.m0")) {
        cfg.init.m0 = to_double("init.m0", *v);
        if (cfg.init.m0 < -1.0 || cfg.init.m0 > 1.0) bad("init.m0", "must lie in [-1, 1]");
    }
    if (const auto* v = get("init.layout")) {
        if (*v == "random") cfg.init.layout = InitLayout::random;
        else if (*v == "clustered") cfg.init.layout = InitLayout::clustered;
        else bad("init.layout", "expected random|clustered");
    }

    if (const auto* v = get("dynamics.steps")) {
        cfg.steps = to_long("dynamics.steps", *v);
        if (cfg.steps < 0) bad("dynamics.steps", "must be >= 0");
    }
    if (const auto* v = get("dynamics.snapshot_every")) {
        cfg.snapshot_every = to_long("dynamics.snapshot_every", *v);
        if (cfg.snapshot_every < 0) bad("dynamics.snapshot_every", "must be >= 0");
    }
    if (const auto* v = get("dynamics.noise")) {
        if (*v == "none") cfg.noise_kind = NoiseKind::none;
        else if (*v == "site") cfg.noise_kind = NoiseKind::site;
        else if (*v == "uniform_global") cfg.noise_kind = NoiseKind::uniform_global;
        else bad("dynamics.noise", "expected none|site|uniform_global");
    }
    if (const auto* v = get("dynamics.noise_dist")) {
        if (*v == "gaussian") cfg.noise_dist = NoiseDist::gaussian;
        else if (*v == "uniform") cfg.noise_dist = NoiseDist::uniform;
        else bad("dynamics.noise_dist", "expected gaussian|uniform");
    }
    if (const auto* v = get("dynamics.noise_amplitude")) {
        cfg.noise_amplitude = to_double("dynamics.noise_amplitude", *v);
        if (cfg.noise_amplitude < 0.0) bad("dynamics.noise_amplitude", "must be >= 0");
    }
    if (const auto* v = get("dynamics.gamma")) cfg.gamma = to_double("dynamics.gamma", *v);
    if (const auto* v = get("dynamics.alpha")) {
        cfg.alpha = to_double("dynamics.alpha", *v);
        if (cfg.alpha < 0.0) bad("dynamics.alpha", "must be >= 0");
    }
    if (const auto* v = get("dynamics.dt")) {
        cfg.dt = to_double("dynamics.dt", *v);
        if (cfg.dt < 0.0) bad("dynamics.dt", "must be >= 0 (0 = auto)");
    }
    if (const auto* v = get("dynamics.t_end")) {
        cfg.t_end = to_double("dynamics.t_end", *v);
        if (!(cfg.t_end >= 0.0)) bad("dynamics.t_end", "must be >= 0");
    }
    if (const auto* v = get("dynamics.conv_tol")) {
        cfg.conv_tol = to_double("dynamics.conv_tol", *v);
        if (!(cfg.conv_tol > 0.0)) bad("dynamics.conv_tol", "must be positive");
    }
    if (const auto* v = get("dynamics.record_every")) {
        cfg.record_every = to_long("dynamics.record_every", *v);
        if (cfg.record_every < 1) bad("dynamics.record_every", "must be >= 1");
    }

    if (const auto* v = get("field.dims")) cfg.field_dims = to_dims("field.dims", *v);
    if (const auto* v = get("field.dx")) {
        cfg.field_dx = to_double("field.dx", *v);
        if (!(cfg.field_dx > 0.0)) bad("field.dx", "must be positive");
    }
    if (const auto* v = get("field.boundary")) {
        if (*v == "periodic") cfg.field_boundary = Boundary::periodic;
        else if (*v == "open") cfg.field_boundary = Boundary::open;
        else bad("field.boundary", "expected periodic|open");
    }
    if (const auto* v = get("field.f.kind")) {
        using K = StrengthFieldSpec::Kind;
        if (*v == "constant") cfg.strength.kind = K::constant;
        else if (*v == "iid_uniform") cfg.strength.kind = K::iid_uniform;
        else if (*v == "linear") cfg.strength.kind = K::linear;
        else if (*v == "smooth_random") cfg.strength.kind = K::smooth_random;
        else if (*v == "disk") cfg.strength.kind = K::disk;
        else bad("field.f.kind", "expected constant|iid_uniform|linear|smooth_random|disk");
    }
    if (const auto* v = get("field.f.value")) cfg.strength.value = to_double("field.f.value", *v);
    if (const auto* v = get("field.f.lo")) cfg.strength.lo = to_double("field.f.lo", *v);
    if (const auto* v = get("field.f.hi")) cfg.strength.hi = to_double("field.f.hi", *v);
    if (const auto* v = get("field.f.offset")) cfg.strength.offset = to_double("field.f.offset", *v);
    if (const auto* v = get("field.f.slope")) cfg.strength.slope = to_double("field.f.slope", *v);
    if (const auto* v = get("field.f.smooth_passes")) {
        long p = to_long("field.f.smooth_passes", *v);
        if (p < 0) bad("field.f.smooth_passes", "must be >= 0");
        cfg.strength.smooth_passes = static_cast<int>(p);
    }
    if (const auto* v = get("field.f.disk_radius")) {
        cfg.strength.disk_radius = to_double("field.f.disk_radius", *v);
        if (cfg.strength.disk_radius < 0.0) bad("field.f.disk_radius", "must be >= 0");
    }
    if (const auto* v = get("field.f.inside_value"))
        cfg.strength.inside_value = to_double("field.f.inside_value", *v);
    if (const auto* v = get("field.init.kind")) {
        using K = FieldInitSpec::Kind;
        if (*v == "constant") cfg.field_init.kind = K::constant;
        else if (*v == "random") cfg.field_init.kind = K::random;
        else if (*v == "tf_positive") cfg.field_init.kind = K::tf_positive;
        else if (*v == "tf_random") cfg.field_init.kind = K::tf_random;
        else if (*v == "disk") cfg.field_init.kind = K::disk;
        else bad("field.init.kind", "expected constant|random|tf_positive|tf_random|disk");
    }
    if (const auto* v = get("field.init.value")) cfg.field_init.value = to_double("field.init.value", *v);
    if (const auto* v = get("field.init.lo")) cfg.field_init.lo = to_double("field.init.lo", *v);
    if (const auto* v = get("field.init.hi")) cfg.field_init.hi = to_double("field.init.hi", *v);
    if (const auto* v = get("field.init.disk_radius")) {
        cfg.field_init.disk_radius = to_double("field.init.disk_radius", *v);
        if (cfg.field_init.disk_radius < 0.0) bad("field.init.disk_radius", "must be >= 0");
    }

    if (const auto* v = get("seeds.disorder")) cfg.seed_disorder = to_seed("seeds.disorder", *v);
    if (const auto* v = get("seeds.noise")) cfg.seed_noise = to_seed("seeds.noise", *v);
    if (const auto* v = get("seeds.init")) cfg.seed_init = to_seed("seeds.init", *v);
    if (const auto* v = get("seeds.field")) cfg.seed_field = to_seed("seeds.field", *v);

    if (const auto* v = get("analysis.eta_dense")) {
        cfg.eta_dense = to_double("analysis.eta_dense", *v);
        if (!(cfg.eta_dense > 0.0)) bad("analysis.eta_dense", "must be positive");
    }
    if (const auto* v = get("analysis.eta_sparse")) {
        cfg.eta_sparse = to_double("analysis.eta_sparse", *v);
        if (!(cfg.eta_sparse > cfg.eta_dense)) bad("analysis.eta_sparse", "must exceed analysis.eta_dense");
    }

    if (const auto* v = get("consensus.predictions")) cfg.predictions_path = *v;
    if (const auto* v = get("consensus.max_steps")) {
        cfg.max_steps = to_long("consensus.max_steps", *v);
        if (cfg.max_steps < 1) bad("consensus.max_steps", "must be >= 1");
    }
    if (const auto* v = get("analyze.f")) cfg.analyze_f = *v;
    if (const auto* v = get("analyze.state")) cfg.analyze_state = *v;

    if (const auto* v = get("sweep.target")) {
        if (*v == "ca") cfg.sweep_target = Mode::ca;
        else if (*v == "pde") cfg.sweep_target = Mode::pde;
        else bad("sweep.target", "expected ca|pde");
    }
    if (const auto* v = get("sweep.axes")) cfg.sweep_axes = split_list(*v);
    for (const auto& [k, v] : raw) {
        if (k.rfind("sweep.values.", 0) != 0) continue;
        std::string axis = k.substr(std::string("sweep.values.").size());
        std::vector<double> vals;
        for (const auto& tok : split_list(v)) vals.push_back(to_double(k, tok));
        cfg.sweep_values[axis] = std::move(vals);
    }

    // mode-dependent consistency
    if (cfg.mode == Mode::consensus && cfg.predictions_path.empty())
        throw ConfigError("consensus mode requires consensus.predictions");
    if (cfg.mode == Mode::analyze && cfg.analyze_f.empty())
        throw ConfigError("analyze mode requires analyze.f");
    if (cfg.mode == Mode::sweep) {
        if (cfg.sweep_axes.empty())
            throw ConfigError("sweep mode requires a non-empty sweep.axes list");
        if (cfg.sweep_axes.size() > 2)
            throw ConfigError("sweep supports at most 2 axes");
        for (const auto& axis : cfg.sweep_axes) {
            if (!known_keys().count(axis))
                throw ConfigError("sweep axis '" + axis + "' is not a config key");
            auto it = cfg.sweep_values.find(axis);
            if (it == cfg.sweep_values.end() || it->second.empty())
                throw ConfigError("sweep axis '" + axis +
                                  "' has no sweep.values." + axis + " list");
        }
        for (const auto& [axis, _] : cfg.sweep_values)
            if (std::find(cfg.sweep_axes.begin(), cfg.sweep_axes.end(), axis) ==
                cfg.sweep_axes.end())
                throw ConfigError("sweep.values." + axis + " has no matching axis");
    }
    bool needs_geometry = cfg.mode == Mode::ca ||
                          (cfg.mode == Mode::sweep && cfg.sweep_target == Mode::ca);
    if (needs_geometry && cfg.geometry.kind == GeometryKind::euclidean_lattice &&
        cfg.geometry.dims.empty())
        throw ConfigError("euclidean_lattice geometry requires geometry.dims");
    if (needs_geometry && cfg.geometry.kind != GeometryKind::euclidean_lattice &&
        cfg.geometry.n_agents == 0)
        throw ConfigError("non-lattice geometry requires geometry.n_agents");
    bool needs_field = cfg.mode == Mode::pde ||
                       (cfg.mode == Mode::sweep && cfg.sweep_target == Mode::pde);
    if (needs_field && cfg.field_dims.empty())
        throw ConfigError("pde mode requires field.dims");
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    return parse_config_map(read_config_file(path));
}

std::string resolved_config_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    auto kv = [&](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
    auto kd = [&](const std::string& k, double v) { kv(k, fmt_double(v)); };
    auto ki = [&](const std::string& k, long long v) { kv(k, std::to_string(v)); };
    kv("mode", to_string(cfg.mode));

    kv("geometry.kind", to_string(cfg.geometry.kind));
    if (!cfg.geometry.dims.empty()) {
        std::string d;
        for (std::size_t i = 0; i < cfg.geometry.dims.size(); ++i)
            d += (i ? "x" : "") + std::to_string(cfg.geometry.dims[i]);
        kv("geometry.dims", d);
    }
    kd("geometry.radius", cfg.geometry.radius);
    kv("geometry.boundary", to_string(cfg.geometry.boundary));
    if (cfg.geometry.n_agents) ki("geometry.n_agents", cfg.geometry.n_agents);
    kd("geometry.connect_prob", cfg.geometry.connect_prob);
    ki("geometry.seed", static_cast<long long>(cfg.geometry.seed));
    ki("geometry.branching", cfg.geometry.branching);
    ki("geometry.depth", cfg.geometry.depth);
    kd("geometry.coupling", cfg.geometry.coupling);
    kd("geometry.ultra_base", cfg.geometry.ultra_base);

    switch (cfg.disorder.dist) {
        case DisorderDist::constant: kv("disorder.dist", "constant"); break;
        case DisorderDist::uniform: kv("disorder.dist", "uniform"); break;
        case DisorderDist::lognormal: kv("disorder.dist", "lognormal"); break;
    }
    kd("disorder.value", cfg.disorder.value);
    kd("disorder.lo", cfg.disorder.lo);
    kd("disorder.hi", cfg.disorder.hi);
    kd("disorder.mu", cfg.disorder.mu);
    kd("disorder.sigma", cfg.disorder.sigma);
    kv("disorder.self_esteem", cfg.disorder.self_esteem ? "true" : "false");
    kd("disorder.beta", cfg.disorder.beta);

    switch (cfg.init.cls) {
        case InitClass::uniform: kv("init.class", "uniform"); break;
        case InitClass::mixed: kv("init.class", "mixed"); break;
        case InitClass::critical: kv("init.class", "critical"); break;
    }
    ki("init.sign", cfg.init.sign);
    kd("init.m0", cfg.init.m0);
    kv("init.layout", cfg.init.layout == InitLayout::random ? "random" : "clustered");

    ki("dynamics.steps", cfg.steps);
    ki("dynamics.snapshot_every", cfg.snapshot_every);
    switch (cfg.noise_kind) {
        case NoiseKind::none: kv("dynamics.noise", "none"); break;
        case NoiseKind::site: kv("dynamics.noise", "site"); break;
        case NoiseKind::uniform_global: kv("dynamics.noise", "uniform_global"); break;
    }
    kv("dynamics.noise_dist", cfg.noise_dist == NoiseDist::gaussian ? "gaussian" : "uniform");
    kd("dynamics.noise_amplitude", cfg.noise_amplitude);
    kd("dynamics.gamma", cfg.gamma);
    kd("dynamics.alpha", cfg.alpha);
    kd("dynamics.dt", cfg.dt);
    kd("dynamics.t_end", cfg.t_end);
    kd("dynamics.conv_tol", cfg.conv_tol);
    ki("dynamics.record_every", cfg.record_every);

    if (!cfg.field_dims.empty()) {
        std::string d;
        for (std::size_t i = 0; i < cfg.field_dims.size(); ++i)
            d += (i ? "x" : "") + std::to_string(cfg.field_dims[i]);
        kv("field.dims", d);
    }
    kd("field.dx", cfg.field_dx);
    kv("field.boundary", to_string(cfg.field_boundary));
    switch (cfg.strength.kind) {
        case StrengthFieldSpec::Kind::constant: kv("field.f.kind", "constant"); break;
        case StrengthFieldSpec::Kind::iid_uniform: kv("field.f.kind", "iid_uniform"); break;
        case StrengthFieldSpec::Kind::linear: kv("field.f.kind", "linear"); break;
        case StrengthFieldSpec::Kind::smooth_random: kv("field.f.kind", "smooth_random"); break;
        case StrengthFieldSpec::Kind::disk: kv("field.f.kind", "disk"); break;
    }
    kd("field.f.value", cfg.strength.value);
    kd("field.f.lo", cfg.strength.lo);
    kd("field.f.hi", cfg.strength.hi);
    kd("field.f.offset", cfg.strength.offset);
    kd("field.f.slope", cfg.strength.slope);
    ki("field.f.smooth_passes", cfg.strength.smooth_passes);
    kd("field.f.disk_radius", cfg.strength.disk_radius);
    kd("field.f.inside_value", cfg.strength.inside_value);
    switch (cfg.field_init.kind) {
        case FieldInitSpec::Kind::constant: kv("field.init.kind", "constant"); break;
        case FieldInitSpec::Kind::random: kv("field.init.kind", "random"); break;
        case FieldInitSpec::Kind::tf_positive: kv("field.init.kind", "tf_positive"); break;
        case FieldInitSpec::Kind::tf_random: kv("field.init.kind", "tf_random"); break;
        case FieldInitSpec::Kind::disk: kv("field.init.kind", "disk"); break;
    }
    kd("field.init.value", cfg.field_init.value);
    kd("field.init.lo", cfg.field_init.lo);
    kd("field.init.hi", cfg.field_init.hi);
    kd("field.init.disk_radius", cfg.field_init.disk_radius);

    ki("seeds.disorder", static_cast<long long>(cfg.seed_disorder));
    ki("seeds.noise", static_cast<long long>(cfg.seed_noise));
    ki("seeds.init", static_cast<long long>(cfg.seed_init));
    ki("seeds.field", static_cast<long long>(cfg.seed_field));

    kd("analysis.eta_dense", cfg.eta_dense);
    kd("analysis.eta_sparse", cfg.eta_sparse);

    if (!cfg.predictions_path.empty()) kv("consensus.predictions", cfg.predictions_path);
    ki("consensus.max_steps", cfg.max_steps);
    if (!cfg.analyze_f.empty()) kv("analyze.f", cfg.analyze_f);
    if (!cfg.analyze_state.empty()) kv("analyze.state", cfg.analyze_state);

    if (cfg.mode == Mode::sweep) {
        kv("sweep.target", to_string(cfg.sweep_target));
        std::string axes;
        for (std::size_t i = 0; i < cfg.sweep_axes.size(); ++i)
            axes += (i ? "," : "") + cfg.sweep_axes[i];
        kv("sweep.axes", axes);
        for (const auto& [axis, vals] : cfg.sweep_values) {
            std::string list;
            for (std::size_t i = 0; i < vals.size(); ++i)
                list += (i ? "," : "") + fmt_double(vals[i]);
            kv("sweep.values." + axis, list);
        }
    }
    return out.str();
}

void apply_seed_override(ExperimentConfig& cfg, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--seed-override expects K=V, got '" + kv + "'");
    std::string key = trim(kv.substr(0, eq));
    std::uint64_t val = to_seed("seed-override " + key, trim(kv.substr(eq + 1)));
    if (key == "disorder") cfg.seed_disorder = val;
    else if (key == "noise") cfg.seed_noise = val;
    else if (key == "init") cfg.seed_init = val;
    else if (key == "field") cfg.seed_field = val;
    else throw ConfigError("unknown seed '" + key + "' (expected disorder|noise|init|field)");
}

namespace {

// neighbour averaging pass used by the smooth_random field generator
std::vector<double> smooth_pass(const std::vector<double>& f,
                                const std::vector<int>& dims, Boundary boundary) {
    int na = static_cast<int>(dims.size());
    long n = 1;
    for (int d : dims) n *= d;
    std::vector<long> strides(na, 1);
    for (int a = na - 2; a >= 0; --a) strides[a] = strides[a + 1] * dims[a + 1];
    std::vector<double> out(n);
    for (long i = 0; i < n; ++i) {
        double acc = f[i];
        int cnt = 1;
        for (int a = 0; a < na; ++a) {
            long c = (i / strides[a]) % dims[a];
            for (int dir = -1; dir <= 1; dir += 2) {
                long cn = c + dir;
                if (cn < 0 || cn >= dims[a]) {
                    if (boundary != Boundary::periodic) continue;
                    cn = (cn + dims[a]) % dims[a];
                }
                acc += f[i + (cn - c) * strides[a]];
                ++cnt;
            }
        }
        out[i] = acc / cnt;
    }
    return out;
}

} // namespace

FieldGrid build_field_grid(const ExperimentConfig& cfg) {
    if (cfg.field_dims.empty()) throw ConfigError("field.dims is required for pde runs");
    FieldGrid grid;
    grid.dims = cfg.field_dims;
    grid.dx = cfg.field_dx;
    grid.boundary = cfg.field_boundary;
    grid.gamma = cfg.gamma;
    grid.alpha = cfg.alpha;
    const long n = grid.cells();
    grid.f.resize(n);
    grid.v.assign(n, 0.0);

    int na = grid.ndim();
    std::vector<long> strides(na, 1);
    for (int a = na - 2; a >= 0; --a) strides[a] = strides[a + 1] * grid.dims[a + 1];
    auto dist_from_center = [&](long i) {
        double d2 = 0.0;
        for (int a = 0; a < na; ++a) {
            double c = static_cast<double>((i / strides[a]) % grid.dims[a]);
            double d = c - grid.dims[a] / 2.0;
            d2 += d * d;
        }
        return std::sqrt(d2);
    };

    using FK = StrengthFieldSpec::Kind;
    switch (cfg.strength.kind) {
        case FK::constant:
            std::fill(grid.f.begin(), grid.f.end(), cfg.strength.value);
            break;
        case FK::iid_uniform: {
            SeqRng rng(cfg.seed_field);
            for (long i = 0; i < n; ++i)
                grid.f[i] = rng.uniform(cfg.strength.lo, cfg.strength.hi);
            break;
        }
        case FK::linear: {
            for (long i = 0; i < n; ++i) {
                double c = static_cast<double>((i / strides[0]) % grid.dims[0]);
                double x = (c - grid.dims[0] / 2.0) * grid.dx;
                grid.f[i] = cfg.strength.offset + cfg.strength.slope * x;
            }
            break;
        }
        case FK::smooth_random: {
            SeqRng rng(cfg.seed_field);
            for (long i = 0; i < n; ++i) grid.f[i] = rng.uniform01();
            for (int p = 0; p < cfg.strength.smooth_passes; ++p)
                grid.f = smooth_pass(grid.f, grid.dims, grid.boundary);
            double lo = grid.f[0], hi = grid.f[0];
            for (double x : grid.f) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            double span = hi > lo ? hi - lo : 1.0;
            for (double& x : grid.f)
                x = cfg.strength.lo + (cfg.strength.hi - cfg.strength.lo) * (x - lo) / span;
            break;
        }
        case FK::disk: {
            for (long i = 0; i < n; ++i)
                grid.f[i] = dist_from_center(i) <= cfg.strength.disk_radius
                                ? cfg.strength.inside_value
                                : cfg.strength.value;
            break;
        }
    }

    using IK = FieldInitSpec::Kind;
    switch (cfg.field_init.kind) {
        case IK::constant:
            std::fill(grid.v.begin(), grid.v.end(), cfg.field_init.value);
            break;
        case IK::random: {
            SeqRng rng(cfg.seed_init);
            for (long i = 0; i < n; ++i)
                grid.v[i] = rng.uniform(cfg.field_init.lo, cfg.field_init.hi);
            break;
        }
        case IK::tf_positive:
            grid.v = thomas_fermi(grid.f, grid.gamma, BranchRule::positive).v0;
            break;
        case IK::tf_random:
            grid.v = thomas_fermi(grid.f, grid.gamma, BranchRule::random_sign,
                                  cfg.seed_init).v0;
            break;
        case IK::disk: {
            auto tf = thomas_fermi(grid.f, grid.gamma, BranchRule::positive);
            grid.v = tf.v0;
            for (long i = 0; i < n; ++i)
                if (dist_from_center(i) <= cfg.field_init.disk_radius)
                    grid.v[i] = -grid.v[i];
            break;
        }
    }
    grid.validate();
    return grid;
}

} // namespace lmfg
