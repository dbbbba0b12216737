#include "etd/sweep.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "etd/io_util.hpp"
#include "etd/parallel.hpp"

namespace etd {

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (int c : counts) n *= static_cast<std::size_t>(c);
    return counts.empty() ? 0 : n;
}

std::vector<int> GridSpec::multi_index(std::size_t index) const {
    std::vector<int> mi(counts.size());
    for (int k = static_cast<int>(counts.size()) - 1; k >= 0; --k) {
        mi[k] = static_cast<int>(index % counts[k]);
        index /= counts[k];
    }
    return mi;
}

std::size_t GridSpec::flat_index(const std::vector<int>& mi) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) idx = idx * counts[k] + mi[k];
    return idx;
}

RVec GridSpec::node(std::size_t index) const {
    const auto mi = multi_index(index);
    RVec x = origin;
    for (int k = 0; k < dim(); ++k) x[k] += mi[k] * spacing[k];
    return x;
}

void GridSpec::validate() const {
    const int d = origin.d;
    if (d != 2 && d != 3) throw std::invalid_argument("grid: dimension must be 2 or 3");
    if (spacing.d != d || static_cast<int>(counts.size()) != d)
        throw std::invalid_argument("grid: origin, spacing and counts must share the dimension");
    for (int k = 0; k < d; ++k) {
        if (counts[k] < 1) throw std::invalid_argument("grid: every axis needs at least one node");
        if (counts[k] > 1 && !(spacing[k] > 0)) throw std::invalid_argument("grid: spacing must be positive");
    }
}

GridSpec centered_grid(const RVec& c, double spacing, int half) {
    if (half < 0 || !(spacing > 0)) throw std::invalid_argument("centered_grid: bad spacing or size");
    GridSpec g{c, RVec(c.d), std::vector<int>(c.d, 2 * half + 1)};
    for (int k = 0; k < c.d; ++k) {
        g.origin[k] -= half * spacing;
        g.spacing[k] = spacing;
    }
    return g;
}

void check_spacing(const GridSpec& grid, const Medium& medium, double omega, double fraction) {
    grid.validate();
    if (grid.dim() != medium.dim) throw std::invalid_argument("grid dimension does not match medium");
    const double lam_min = 2 * kPi / medium.kappa(Mode::S, omega);
    for (int k = 0; k < grid.dim(); ++k)
        if (grid.counts[k] > 1 && grid.spacing[k] > fraction * lam_min * (1 + 1e-12)) {
            std::ostringstream os;
            os << "grid spacing " << grid.spacing[k] << " exceeds " << fraction << " * lambda_min = "
               << fraction * lam_min;
            throw std::invalid_argument(os.str());
        }
}

void analyze_map(IndicatorMap& map) {
    const auto& v = map.values;
    const int d = map.grid.dim();
    map.fwhm.assign(d, std::nullopt);
    if (v.empty()) return;
    std::size_t best = 0;
    double lo = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
        lo = std::min(lo, v[i]);
    }
    map.peak_index = best;
    map.peak_value = v[best];
    if (!(v[best] > lo) || !(v[best] > 0)) return;
    const double half = 0.5 * v[best];
    const auto mi0 = map.grid.multi_index(best);
    for (int k = 0; k < d; ++k) {
        const int n = map.grid.counts[k];
        auto at = [&](int i) {
            auto mi = mi0;
            mi[k] = i;
            return v[map.grid.flat_index(mi)];
        };
        // Fractional positions of the half-maximum crossings on either side of the peak.
        std::optional<double> left, right;
        for (int i = mi0[k]; i > 0; --i)
            if (at(i - 1) < half) {
                left = i - (at(i) - half) / (at(i) - at(i - 1));
                break;
            }
        for (int i = mi0[k]; i + 1 < n; ++i)
            if (at(i + 1) < half) {
                right = i + (at(i) - half) / (at(i) - at(i + 1));
                break;
            }
        if (left && right) map.fwhm[k] = (*right - *left) * map.grid.spacing[k];
    }
}

IndicatorMap sweep_map(const GridSpec& grid, const std::function<double(const RVec&)>& f, int threads) {
    grid.validate();
    IndicatorMap map;
    map.grid = grid;
    map.values.assign(grid.size(), 0.0);
    parallel_for(grid.size(), threads, [&](std::size_t i) { map.values[i] = f(grid.node(i)); });
    analyze_map(map);
    return map;
}

const char* indicator_name(IndicatorKind k) {
    switch (k) {
        case IndicatorKind::TDsingle: return "TDsingle";
        case IndicatorKind::TDmulti: return "TDmulti";
        case IndicatorKind::Wsingle: return "Wsingle";
        case IndicatorKind::Wmulti: return "Wmulti";
    }
    return "";
}

IndicatorKind indicator_from_name(const std::string& s) {
    for (auto k : {IndicatorKind::TDsingle, IndicatorKind::TDmulti, IndicatorKind::Wsingle, IndicatorKind::Wmulti})
        if (s == indicator_name(k)) return k;
    throw std::invalid_argument("unknown indicator kind: " + s);
}

IndicatorMap sweep_indicator(IndicatorKind kind, const IndicatorEvaluator& eval, const GridSpec& grid,
                             std::size_t record, int threads, double fraction) {
    const auto& ds = eval.dataset();
    check_spacing(grid, ds.medium, ds.omega, fraction);
    if ((kind == IndicatorKind::TDsingle || kind == IndicatorKind::Wsingle) && record >= eval.records())
        throw std::invalid_argument("sweep: record index out of range");
    auto f = [&](const RVec& z) {
        switch (kind) {
            case IndicatorKind::TDsingle: return eval.single(record, z).td;
            case IndicatorKind::Wsingle: return eval.single(record, z).w;
            case IndicatorKind::TDmulti: return eval.multi(z).td;
            case IndicatorKind::Wmulti: return eval.multi(z).w;
        }
        return 0.0;
    };
    IndicatorMap map = sweep_map(grid, f, threads);
    map.params["indicator"] = indicator_name(kind);
    map.params["omega"] = ds.omega;
    map.params["shots"] = ds.shots();
    map.params["incident_mode"] = mode_name(ds.incidents.front().mode);
    if (kind == IndicatorKind::TDsingle || kind == IndicatorKind::Wsingle) map.params["record"] = record;
    return map;
}

std::string map_csv(const IndicatorMap& map) {
    static const char* axes[3] = {"x", "y", "z"};
    std::ostringstream os;
    const int d = map.grid.dim();
    for (int k = 0; k < d; ++k) os << axes[k] << ",";
    os << "value\n";
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const RVec x = map.grid.node(i);
        for (int k = 0; k < d; ++k) os << fmt17(x[k]) << ",";
        os << fmt17(map.values[i]) << "\n";
    }
    return os.str();
}

nlohmann::json map_sidecar(const IndicatorMap& map) {
    nlohmann::json j;
    const int d = map.grid.dim();
    std::vector<double> origin(d), spacing(d), peak(d);
    const RVec p = map.peak_point();
    for (int k = 0; k < d; ++k) {
        origin[k] = map.grid.origin[k];
        spacing[k] = map.grid.spacing[k];
        peak[k] = p[k];
    }
    j["grid"] = {{"origin", origin}, {"spacing", spacing}, {"counts", map.grid.counts}};
    j["peak"] = {{"index", map.peak_index}, {"point", peak}, {"value", map.peak_value}};
    nlohmann::json fw = nlohmann::json::array();
    for (const auto& f : map.fwhm) fw.push_back(f ? nlohmann::json(*f) : nlohmann::json(nullptr));
    j["fwhm"] = fw;
    j["params"] = map.params;
    return j;
}

void write_map(const IndicatorMap& map, const std::string& prefix) {
    write_text_file(prefix + ".csv", map_csv(map));
    write_text_file(prefix + ".json", map_sidecar(map).dump(2) + "\n");
}

}  // namespace etd
