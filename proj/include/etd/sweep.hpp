#pragma once
// Rectangular search grids, indicator maps, peak location and focal-spot widths.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "etd/imaging.hpp"
#include "json.hpp"

namespace etd {

struct GridSpec {
    RVec origin;
    RVec spacing;
    std::vector<int> counts;  // nodes per axis; x varies slowest

    int dim() const { return origin.d; }
    std::size_t size() const;
    RVec node(std::size_t index) const;
    std::vector<int> multi_index(std::size_t index) const;
    std::size_t flat_index(const std::vector<int>& mi) const;
    // Throws std::invalid_argument on malformed specs.
    void validate() const;
};

// Grid centered at c with 2*half+1 nodes per axis.
GridSpec centered_grid(const RVec& c, double spacing, int half);

// Rejects spacing > fraction * (shortest wavelength).
void check_spacing(const GridSpec& grid, const Medium& medium, double omega, double fraction = 0.1);

struct IndicatorMap {
    GridSpec grid;
    std::vector<double> values;
    std::size_t peak_index = 0;
    double peak_value = 0;
    // Per-axis full width at half maximum through the peak; absent for flat maps or unbracketed crossings.
    std::vector<std::optional<double>> fwhm;
    nlohmann::json params = nlohmann::json::object();

    RVec peak_point() const { return grid.node(peak_index); }
};

// Fills values, peak (lexicographically smallest argmax) and FWHM.
IndicatorMap sweep_map(const GridSpec& grid, const std::function<double(const RVec&)>& f, int threads = 1);
void analyze_map(IndicatorMap& map);

enum class IndicatorKind { TDsingle, TDmulti, Wsingle, Wmulti };
const char* indicator_name(IndicatorKind k);
IndicatorKind indicator_from_name(const std::string& s);

// Single-shot kinds use `record`. Applies the spacing guard with `fraction`.
IndicatorMap sweep_indicator(IndicatorKind kind, const IndicatorEvaluator& eval, const GridSpec& grid,
                             std::size_t record = 0, int threads = 1, double fraction = 0.1);

// prefix.csv with header "x,y[,z],value" and prefix.json with grid, peak, FWHM and params.
void write_map(const IndicatorMap& map, const std::string& prefix);
std::string map_csv(const IndicatorMap& map);
nlohmann::json map_sidecar(const IndicatorMap& map);

}  // namespace etd
