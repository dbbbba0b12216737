#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "etd/farfield.hpp"
#include "etd/io_util.hpp"
#include "json.hpp"

namespace etd {

namespace {

using nlohmann::json;

json vec_json(const RVec& v) {
    json a = json::array();
    for (int i = 0; i < v.d; ++i) a.push_back(v[i]);
    return a;
}

RVec vec_from(const json& a) {
    RVec v(static_cast<int>(a.size()));
    for (int i = 0; i < v.d; ++i) v[i] = a.at(i).get<double>();
    return v;
}

}  // namespace

json medium_to_json(const Medium& m) {
    return {{"lambda0", m.lambda0}, {"mu0", m.mu0}, {"rho0", m.rho0}, {"dim", m.dim}};
}

Medium medium_from_json(const json& j) {
    return Medium(j.at("lambda0").get<double>(), j.at("mu0").get<double>(), j.at("rho0").get<double>(),
                  j.at("dim").get<int>());
}

json emt_to_json(const Emt& e) {
    json a = json::array();
    const int d = e.dim();
    for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) a.push_back(e(l, m, p, q));
    return {{"dim", d}, {"entries", a}};
}

Emt emt_from_json(const json& j) {
    const int d = j.at("dim").get<int>();
    const json& a = j.at("entries");
    if (static_cast<int>(a.size()) != d * d * d * d) throw std::invalid_argument("EMT entry count mismatch");
    RTen4 t(d);
    int k = 0;
    for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) t(l, m, p, q) = a.at(k++).get<double>();
    return Emt::from_tensor(t);
}

json inclusion_to_json(const Inclusion& inc) {
    json j = {{"center", vec_json(inc.center)}, {"epsilon", inc.epsilon},        {"rho1", inc.rho1},
              {"kind", contrast_name(inc.kind)},  {"emt", emt_to_json(inc.emt)}, {"guard", inc.guard},
              {"strict_guard", inc.strict_guard}};
    if (inc.lambda1) j["lambda1"] = *inc.lambda1;
    if (inc.mu1) j["mu1"] = *inc.mu1;
    return j;
}

Inclusion inclusion_from_json(const json& j) {
    Inclusion inc;
    inc.center = vec_from(j.at("center"));
    inc.epsilon = j.at("epsilon").get<double>();
    inc.rho1 = j.at("rho1").get<double>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "density")
        inc.kind = ContrastKind::Density;
    else if (kind == "elasticity")
        inc.kind = ContrastKind::Elasticity;
    else
        throw std::invalid_argument("unknown contrast kind '" + kind + "'");
    inc.emt = emt_from_json(j.at("emt"));
    inc.guard = j.value("guard", 0.3);
    inc.strict_guard = j.value("strict_guard", false);
    if (j.contains("lambda1")) inc.lambda1 = j.at("lambda1").get<double>();
    if (j.contains("mu1")) inc.mu1 = j.at("mu1").get<double>();
    return inc;
}

void write_dataset(const FarFieldDataset& ds, const std::string& prefix) {
    const int d = ds.medium.dim;
    json meta;
    meta["medium"] = medium_to_json(ds.medium);
    meta["inclusion"] = inclusion_to_json(ds.inclusion);
    meta["omega"] = ds.omega;
    meta["seed"] = ds.seed;
    json nodes = json::array(), weights = json::array();
    for (std::size_t i = 0; i < ds.directions.size(); ++i) {
        nodes.push_back(vec_json(ds.directions.nodes[i]));
        weights.push_back(ds.directions.weights[i]);
    }
    meta["directions"] = {{"dim", ds.directions.dim}, {"nodes", nodes}, {"weights", weights}};
    json incs = json::array();
    for (const auto& w : ds.incidents)
        incs.push_back({{"mode", mode_name(w.mode)},
                        {"theta", vec_json(w.theta)},
                        {"transverse_index", w.transverse_index},
                        {"omega", w.omega}});
    meta["incidents"] = incs;
    write_text_file(prefix + ".json", meta.dump(2) + "\n");

    std::ostringstream os;
    os << "incident,direction";
    const char* axes = "xyz";
    for (const char* part : {"P", "S"})
        for (int c = 0; c < d; ++c) os << "," << part << axes[c] << "_re," << part << axes[c] << "_im";
    os << "\n";
    for (std::size_t j = 0; j < ds.samples.size(); ++j)
        for (std::size_t i = 0; i < ds.samples[j].size(); ++i) {
            os << j << "," << i;
            const auto& s = ds.samples[j][i];
            for (const CVec* v : {&s.P, &s.S})
                for (int c = 0; c < d; ++c) os << "," << fmt17((*v)[c].real()) << "," << fmt17((*v)[c].imag());
            os << "\n";
        }
    write_text_file(prefix + ".csv", os.str());
}

FarFieldDataset read_dataset(const std::string& prefix) {
    json meta;
    try {
        meta = json::parse(read_text_file(prefix + ".json"));
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed dataset metadata " + prefix + ".json: " + e.what());
    }
    FarFieldDataset ds;
    ds.medium = medium_from_json(meta.at("medium"));
    ds.inclusion = inclusion_from_json(meta.at("inclusion"));
    ds.omega = meta.at("omega").get<double>();
    ds.seed = meta.at("seed").get<std::uint64_t>();
    const json& dirs = meta.at("directions");
    ds.directions.dim = dirs.at("dim").get<int>();
    for (const auto& n : dirs.at("nodes")) ds.directions.nodes.push_back(vec_from(n));
    for (const auto& w : dirs.at("weights")) ds.directions.weights.push_back(w.get<double>());
    for (const auto& w : meta.at("incidents")) {
        IncidentWave iw;
        iw.mode = w.at("mode").get<std::string>() == "P" ? Mode::P : Mode::S;
        iw.theta = vec_from(w.at("theta"));
        iw.transverse_index = w.at("transverse_index").get<int>();
        iw.omega = w.at("omega").get<double>();
        ds.incidents.push_back(iw);
    }

    const int d = ds.medium.dim;
    const std::size_t nd = ds.directions.size();
    ds.samples.assign(ds.incidents.size(), std::vector<FarFieldSample>(nd, FarFieldSample{CVec(d), CVec(d)}));
    std::istringstream in(read_text_file(prefix + ".csv"));
    std::string line;
    std::getline(in, line);  // header
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != 2 + 4 * d) throw std::runtime_error("dataset row has wrong column count");
        const std::size_t j = std::stoul(cells[0]), i = std::stoul(cells[1]);
        if (j >= ds.incidents.size() || i >= nd) throw std::runtime_error("dataset row index out of range");
        auto& s = ds.samples[j][i];
        std::size_t k = 2;
        for (CVec* v : {&s.P, &s.S})
            for (int c = 0; c < d; ++c) {
                const double re = parse_double(cells[k++]);
                const double im = parse_double(cells[k++]);
                (*v)[c] = cplx(re, im);
            }
        ++rows;
    }
    if (rows != ds.incidents.size() * nd) throw std::runtime_error("dataset CSV row count does not match metadata");
    ds.validate(1e-10);
    return ds;
}

}  // namespace etd
