#include "qmr/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qmr/errors.hpp"

namespace qmr {

namespace {

// JSON has no infinities; they travel as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_in(const json& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

json quad(const Quadruple& q) { return json::array({q[0], q[1], q[2], q[3]}); }

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

const json& field(const json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return j[key];
}

}  // namespace

json envelope(const std::string& kind, const json& provenance) {
    json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = kind;
    j["generator"] = provenance;
    j["tool_version"] = kToolVersion;
    return j;
}

void check_schema(const json& j) {
    if (!j.is_object() || !j.contains("schema")) throw ValidationError("file carries no schema version");
    if (j["schema"] != kSchemaVersion)
        throw ValidationError("unsupported schema version " + j["schema"].dump());
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + path);
        out << text;
        if (!out) throw ValidationError("write failed for " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw ValidationError("cannot rename onto " + path);
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string space_to_csv(const FiniteMetricSpace& space) {
    std::ostringstream s;
    s.precision(17);
    s << space.size() << "\n";
    for (Index i = 0; i < space.size(); ++i) {
        for (Index j = 0; j < space.size(); ++j) s << (j ? "," : "") << space(i, j);
        s << "\n";
    }
    return s.str();
}

namespace {

// First line n, then n rows of n comma-separated numbers ("inf" allowed).
std::vector<double> matrix_from_csv(const std::string& text, std::size_t& n) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty matrix CSV");
    try {
        n = std::stoul(line);
    } catch (const std::exception&) {
        throw ValidationError("first CSV line must be the point count");
    }
    std::vector<double> m;
    m.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ShapeError("matrix CSV has fewer than n rows");
        std::istringstream row(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(row, cell, ',')) {
            try {
                m.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ValidationError("bad number in row " + std::to_string(i) + ": '" + cell + "'");
            }
            ++cols;
        }
        if (cols != n) throw ShapeError("row " + std::to_string(i) + " has " + std::to_string(cols) + " entries");
    }
    return m;
}

}  // namespace

FiniteMetricSpace space_from_csv(const std::string& text, std::string label) {
    std::size_t n = 0;
    auto dist = matrix_from_csv(text, n);
    return FiniteMetricSpace(n, std::move(dist), std::move(label));
}

std::string boundary_to_csv(const BoundarySample& s) {
    std::ostringstream out;
    out.precision(17);
    out << s.size() << "\n";
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (b) out << ",";
            if (a == b) out << "inf";
            else out << s.gromov(a, b);
        }
        out << "\n";
    }
    return out.str();
}

BoundarySample boundary_from_csv(const std::string& text) {
    BoundarySample s;
    s.source = "csv";
    s.gromov.products = matrix_from_csv(text, s.gromov.n);
    for (std::size_t i = 0; i < s.gromov.n; ++i) {
        s.gromov.at(i, i) = std::numeric_limits<double>::infinity();
        s.labels.push_back("xi" + std::to_string(i));
    }
    validate_boundary(s);
    return s;
}

BoundarySample load_boundary(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return boundary_from_csv(read_file(path));
    return boundary_from_json(read_json(path));
}

json space_to_json(const FiniteMetricSpace& space, const json& provenance) {
    json j = envelope("finite_metric_space", provenance);
    j["label"] = space.label();
    j["n"] = space.size();
    j["distances"] = space.matrix();
    if (space.has_coords()) j["coords"] = space.coords();
    return j;
}

FiniteMetricSpace space_from_json(const json& j) {
    check_schema(j);
    const auto n = field(j, "n").get<std::size_t>();
    auto dist = field(j, "distances").get<std::vector<double>>();
    std::vector<std::vector<double>> coords;
    if (j.contains("coords")) coords = j["coords"].get<std::vector<std::vector<double>>>();
    return FiniteMetricSpace(n, std::move(dist), j.value("label", std::string("json")), Validation::automatic,
                             std::move(coords));
}

FiniteMetricSpace load_space(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return space_from_csv(read_file(path), path);
    return space_from_json(read_json(path));
}

json boundary_to_json(const BoundarySample& s, const json& provenance) {
    json j = envelope("boundary_sample", provenance);
    j["labels"] = s.labels;
    j["source"] = s.source;
    j["uncertainty"] = s.uncertainty;
    j["n"] = s.size();
    // Upper triangle, row by row.
    std::vector<double> upper;
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b) upper.push_back(s.gromov(a, b));
    j["gromov_upper"] = upper;
    return j;
}

BoundarySample boundary_from_json(const json& j) {
    check_schema(j);
    BoundarySample s;
    const auto n = field(j, "n").get<std::size_t>();
    s.labels = j.value("labels", std::vector<std::string>{});
    s.source = j.value("source", std::string("file"));
    s.uncertainty = j.value("uncertainty", 0.0);
    const auto upper = field(j, "gromov_upper").get<std::vector<double>>();
    if (upper.size() != n * (n - 1) / 2) throw ShapeError("gromov_upper has the wrong length");
    s.gromov.n = n;
    s.gromov.products.assign(n * n, std::numeric_limits<double>::infinity());
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) s.gromov.at(a, b) = s.gromov.at(b, a) = upper[k++];
    if (s.labels.empty())
        for (std::size_t a = 0; a < n; ++a) s.labels.push_back("xi" + std::to_string(a));
    validate_boundary(s);
    return s;
}

json to_json(const Mobius& g) {
    return json::array({cplx_json(g.a), cplx_json(g.b), cplx_json(g.c), cplx_json(g.d)});
}

json model_to_json(const GroupActionModel& m, const json& provenance) {
    json j = envelope("group_action_model", provenance);
    j["name"] = m.name;
    j["model"] = m.kind == ModelKind::h2_disk ? "h2_disk" : "h3_upper";
    j["generators"] = json::array();
    for (const auto& g : m.generators) j["generators"].push_back(to_json(g));
    j["inverse_of"] = m.inverse_of;
    if (m.kind == ModelKind::h2_disk)
        j["base"] = cplx_json(m.base_disk);
    else
        j["base"] = {{"x", cplx_json(m.base_upper.x)}, {"t", m.base_upper.t}};
    j["dirichlet"] = m.dirichlet;
    return j;
}

json orbit_to_json(const OrbitBall& orbit) {
    json j = envelope("orbit_ball", {{"group", orbit.group}});
    j["group"] = orbit.group;
    j["R"] = orbit.R;
    j["margin"] = orbit.margin;
    j["explored"] = orbit.explored;
    j["truncated"] = orbit.truncated;
    j["truncation_reason"] = orbit.truncation_reason;
    j["count"] = orbit.points.size();
    std::vector<double> d;
    d.reserve(orbit.points.size());
    for (const auto& p : orbit.points) d.push_back(p.distance);
    j["distances"] = d;
    return j;
}

OrbitBall orbit_from_json(const json& j) {
    check_schema(j);
    if (j.value("kind", std::string()) != "orbit_ball") throw ValidationError("not an orbit file");
    OrbitBall o;
    o.group = j.value("group", std::string());
    o.R = field(j, "R").get<double>();
    o.margin = j.value("margin", 0.0);
    o.explored = j.value("explored", std::size_t{0});
    o.truncated = j.value("truncated", false);
    o.truncation_reason = j.value("truncation_reason", std::string());
    for (double d : field(j, "distances").get<std::vector<double>>()) {
        OrbitPoint p;
        p.distance = d;
        o.points.push_back(p);
    }
    for (std::size_t i = 1; i < o.points.size(); ++i)
        if (o.points[i].distance < o.points[i - 1].distance) throw ValidationError("orbit distances not sorted");
    return o;
}

json to_json(const DesnowflakeReport& r) {
    json j = envelope("desnowflake");
    j["eps"] = r.eps;
    j["requested_window"] = {r.requested_kmin, r.requested_kmax};
    j["window"] = {r.kmin, r.kmax};
    j["resolved_kmax"] = r.resolved_kmax;
    j["mesh"] = r.mesh;
    j["normalization"] = r.normalization;
    j["pair_threshold"] = r.pair_threshold;
    j["mesh_factor"] = r.mesh_factor;
    j["pair_factor"] = r.pair_factor;
    j["inflation"] = r.inflation;
    j["uses_reference"] = r.uses_reference;
    j["pairs"] = r.pairs.size();
    j["band_low"] = r.band_low;
    j["band_high"] = r.band_high;
    j["band_ratio"] = num(r.band_ratio());
    j["lower_constant"] = r.lower_constant;
    j["path_lower_bound_holds"] = r.path_lower_bound_holds;
    j["monotone_refinement"] = r.monotone_refinement;
    j["levels"] = json::array();
    for (const auto& l : r.levels) {
        j["levels"].push_back({{"k", l.k},
                               {"net_size", l.net_size},
                               {"max_degree", l.max_degree},
                               {"band_low", num(l.band_low)},
                               {"band_high", num(l.band_high)},
                               {"band_pairs", l.band_pairs},
                               {"path_lower_bound_holds", l.path_lower_bound_holds}});
    }
    return j;
}

json to_json(const IterationLemmaReport& r) {
    json j = envelope("iteration_lemma");
    j["eps"] = r.eps;
    j["m"] = r.m;
    j["k"] = r.k;
    j["pairs"] = r.pairs.size();
    j["empirical_C"] = r.empirical_C;
    j["unreachable"] = r.unreachable;
    return j;
}

json to_json(const LengthVolumeResult& r) {
    json j = envelope("length_volume");
    j["N"] = r.N;
    j["d"] = r.d;
    j["product"] = r.product;
    j["holds"] = r.holds;
    j["witnesses"] = r.witnesses;
    return j;
}

json to_json(const ChainCountMap& r) {
    json j = envelope("chain_count_map");
    j["kept"] = r.kept;
    j["dropped"] = r.dropped;
    j["f0"] = r.f0;
    j["d"] = r.d;
    j["face_claim_holds"] = r.face_claim_holds;
    j["far_face_claim_holds"] = r.far_face_claim_holds;
    j["boundary_points_checked"] = r.boundary_points_checked;
    return j;
}

json to_json(const CubeCover& c) {
    json j = envelope("cube_cover");
    j["n"] = c.n;
    j["grid_resolution"] = c.resolution();
    j["sets"] = json::array();
    for (const auto& s : c.sets) {
        json boxes = json::array();
        for (const auto& b : s.boxes) boxes.push_back({{"lo", b.lo}, {"hi", b.hi}});
        j["sets"].push_back(boxes);
    }
    return j;
}

json to_json(const FuzzReport& r) {
    json j = envelope("cube_fuzz");
    j["n"] = r.n;
    j["instances"] = r.instances;
    j["max_sets"] = r.max_sets;
    j["violations"] = r.violations;
    j["records"] = json::array();
    for (const auto& x : r.records)
        j["records"].push_back({{"seed", x.seed}, {"N", x.N}, {"d", x.d}, {"product", x.product}, {"holds", x.holds}});
    j["falsifications"] = json::array();
    for (const auto& c : r.falsifications) j["falsifications"].push_back(to_json(c));
    return j;
}

json to_json(const SphereCube& c) {
    json j = envelope("cube_in_sphere");
    j["n"] = c.n;
    j["delta"] = c.config.delta;
    j["rho"] = {c.rho0, c.rho1};
    j["cap_radius"] = c.cap_radius;
    j["half_width"] = c.half_width;
    j["samples_per_face"] = c.samples_per_face;
    j["min_opposite_distance"] = c.min_opposite_distance;
    j["fitted_c"] = c.fitted_c;
    j["faces_inside"] = c.faces_inside;
    j["avoids_cap"] = c.avoids_cap;
    j["avoids_E"] = c.avoids_E;
    return j;
}

json to_json(const StereoSweep& s) {
    json j = envelope("stereo_sweep");
    j["delta"] = s.delta;
    j["pairs"] = s.pairs;
    j["min_ratio"] = s.min_ratio;
    j["max_ratio"] = s.max_ratio;
    j["c2"] = s.c2;
    return j;
}

json to_json(const DeltaReport& r) {
    json j = envelope("four_point_delta");
    j["delta"] = r.delta;
    j["triples"] = r.triples;
    j["exhaustive"] = r.exhaustive;
    j["worst"] = r.worst;
    return j;
}

json to_json(const AcuReport& r) {
    json j = envelope("acu");
    j["kappa"] = r.kappa;
    j["coefficient"] = r.coefficient;
    j["lengths"] = r.lengths;
    j["c_by_length"] = r.c_by_length;
    j["c"] = r.c;
    j["growth_slope"] = r.growth_slope;
    j["violation"] = r.violation;
    j["sources"] = r.sources;
    j["random_walks"] = r.random_walks;
    return j;
}

json to_json(const VisualMetricReport& r, bool with_matrices) {
    json j = envelope("visual_metric");
    j["eps"] = r.eps;
    j["n"] = r.n;
    j["K"] = r.K;
    j["threshold"] = r.threshold;
    j["applicable"] = r.applicable;
    j["min_ratio"] = r.min_ratio;
    j["max_ratio"] = r.max_ratio;
    j["upper_holds"] = r.upper_holds;
    j["lower_holds"] = r.lower_holds;
    if (with_matrices) {
        j["rho"] = r.rho;
        j["d_eps"] = r.d_eps;
    }
    return j;
}

json to_json(const EntropyEstimate& e) {
    json j = envelope("entropy");
    j["slope"] = e.slope;
    j["intercept"] = e.intercept;
    j["standard_error"] = e.standard_error;
    j["window"] = {e.window_lo, e.window_hi};
    j["radii"] = e.radii;
    j["log_counts"] = e.log_counts;
    return j;
}

json to_json(const BoundaryActionReport& r) {
    json j = envelope("boundary_action");
    j["quadruples"] = r.quadruples;
    j["max_deviation"] = r.max_deviation;
    j["C"] = r.C;
    return j;
}

json to_json(const BoxCountFit& f) {
    json j = envelope("box_count");
    j["radii"] = f.radii;
    j["counts"] = f.counts;
    j["counts_prev"] = f.counts_prev;
    std::vector<bool> resolved(f.resolved.begin(), f.resolved.end());
    j["resolved"] = resolved;
    j["slope"] = f.slope;
    j["resolved_count"] = f.resolved_count;
    return j;
}

json to_json(const ElevatorCertificate& c) {
    json j = envelope("elevator");
    j["p"] = c.p;
    j["r"] = c.r;
    j["L"] = c.L;
    j["g"] = to_json(c.g);
    j["x2"] = c.x2;
    j["x3"] = c.x3;
    j["d12"] = c.d12;
    j["d13"] = c.d13;
    j["separation"] = c.separation;
    j["sample_size"] = c.sample_size;
    j["candidates"] = c.candidates;
    j["C_i"] = c.C_i;
    j["C_ii"] = c.C_ii;
    j["c_iii"] = num(c.c_iii);
    j["omega_iv"] = c.omega_iv;
    j["far_empty"] = c.far_empty;
    j["far_diameter"] = c.far_diameter;
    return j;
}

json to_json(const DistortionReport& r) {
    json j = envelope("qm_distortion");
    j["map"] = r.map_label;
    j["C"] = r.linear_constant_C;
    j["worst_quadruple"] = quad(r.worst_quadruple);
    j["samples"] = r.sample_count;
    j["exhaustive"] = r.exhaustive;
    return j;
}

json to_json(const RegularityFit& r) {
    json j = envelope("ahlfors_fit");
    j["alpha"] = r.dimension_alpha;
    j["C"] = r.constant_C;
    j["fitted_slope"] = r.fitted_slope;
    j["consistent"] = r.consistent;
    j["scales"] = json::array();
    for (const auto& [rad, cnt] : r.scales) j["scales"].push_back({rad, cnt});
    return j;
}

std::vector<std::string> plot_views() {
    return {"entropy", "desnowflake", "cube_fuzz", "box_count", "elevator", "visual", "acu"};
}

std::string emit_plot_data(const json& report, const std::string& view) {
    check_schema(report);
    std::ostringstream s;
    s.precision(12);
    auto need = [&](const char* kind) {
        const std::string k = report.value("kind", std::string());
        if (k != kind) throw ParameterError("view '" + view + "' needs a " + kind + " report, got '" + k + "'");
    };
    if (view == "entropy") {
        need("entropy");
        s << "R,log_N\n";
        const auto& r = report["radii"];
        const auto& c = report["log_counts"];
        for (std::size_t i = 0; i < r.size(); ++i) s << r[i].get<double>() << "," << c[i].get<double>() << "\n";
    } else if (view == "desnowflake") {
        need("desnowflake");
        s << "k,C_low,C_high\n";
        for (const auto& l : report["levels"])
            s << l["k"].get<int>() << "," << num_in(l["band_low"]) << "," << num_in(l["band_high"]) << "\n";
    } else if (view == "cube_fuzz") {
        need("cube_fuzz");
        s << "N,product\n";
        for (const auto& x : report["records"]) s << x["N"].get<std::size_t>() << "," << x["product"].get<double>() << "\n";
    } else if (view == "box_count") {
        need("box_count");
        s << "radius,count,resolved\n";
        for (std::size_t i = 0; i < report["radii"].size(); ++i)
            s << report["radii"][i].get<double>() << "," << report["counts"][i].get<std::size_t>() << ","
              << (report["resolved"][i].get<bool>() ? 1 : 0) << "\n";
    } else if (view == "elevator") {
        const std::string k = report.value("kind", std::string());
        if (k != "elevator" && k != "elevator_sweep")
            throw ParameterError("view 'elevator' needs an elevator report, got '" + k + "'");
        s << "r,L,C_i,C_ii,c_iii,omega_iv\n";
        const json runs = k == "elevator" ? json::array({report}) : report["runs"];
        for (const auto& c : runs)
            s << c["r"].get<double>() << "," << c["L"].get<double>() << "," << c["C_i"].get<double>() << ","
              << c["C_ii"].get<double>() << "," << num_in(c["c_iii"]) << "," << c["omega_iv"].get<double>() << "\n";
    } else if (view == "visual") {
        need("visual_metric");
        if (!report.contains("rho")) throw ParameterError("visual report was written without matrices");
        const auto n = report["n"].get<std::size_t>();
        s << "i,j,rho,d_eps\n";
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                s << a << "," << b << "," << report["rho"][a * n + b].get<double>() << ","
                  << report["d_eps"][a * n + b].get<double>() << "\n";
    } else if (view == "acu") {
        need("acu");
        s << "h,c_h\n";
        for (std::size_t i = 0; i < report["lengths"].size(); ++i)
            s << report["lengths"][i].get<std::size_t>() << "," << report["c_by_length"][i].get<double>() << "\n";
    } else {
        std::string known;
        for (const auto& v : plot_views()) known += (known.empty() ? "" : ", ") + v;
        throw ParameterError("unknown view '" + view + "' (available: " + known + ")");
    }
    return s.str();
}

}  // namespace qmr
