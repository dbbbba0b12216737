#include "etd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "etd/io_util.hpp"

namespace etd {

namespace {

using Sections = std::map<std::string, std::map<std::string, std::string>>;

enum class Kind { Num, Int, Str, Bool, NumList, StrList };

struct Field {
    const char* section;
    const char* key;
    Kind kind;
    const char* comment;
    std::function<std::optional<std::string>(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_num(const std::string& s) {
    const double v = parse_double(trim(s));
    if (!std::isfinite(v)) throw std::invalid_argument("not a finite number: " + s);
    return v;
}

long long to_int(const std::string& s) {
    const std::string t = trim(s);
    std::size_t pos = 0;
    const long long v = std::stoll(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("not an integer: " + s);
    return v;
}

bool to_bool(const std::string& s) {
    const std::string t = trim(s);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw std::invalid_argument("not a boolean: " + s);
}

std::vector<double> to_nums(const std::string& s) {
    std::vector<double> out;
    for (const auto& x : split_list(s)) out.push_back(to_num(x));
    return out;
}

std::string join_nums(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt17(v[i]);
    return out;
}

std::string join_strs(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}

std::optional<std::string> opt_num(const std::optional<double>& v) {
    return v ? std::optional<std::string>(fmt17(*v)) : std::nullopt;
}

#define NUM(sec, key, member, comment)                                                              \
    Field {                                                                                         \
        sec, key, Kind::Num, comment, [](const ExperimentConfig& c) { return std::optional<std::string>(fmt17(c.member)); }, \
            [](ExperimentConfig& c, const std::string& s) { c.member = to_num(s); }                 \
    }
#define OPTNUM(sec, key, member, comment)                                                           \
    Field {                                                                                         \
        sec, key, Kind::Num, comment, [](const ExperimentConfig& c) { return opt_num(c.member); },  \
            [](ExperimentConfig& c, const std::string& s) { c.member = to_num(s); }                 \
    }
#define INT(sec, key, member, comment)                                                              \
    Field {                                                                                         \
        sec, key, Kind::Int, comment,                                                               \
            [](const ExperimentConfig& c) { return std::optional<std::string>(std::to_string(c.member)); }, \
            [](ExperimentConfig& c, const std::string& s) { c.member = static_cast<int>(to_int(s)); } \
    }
#define STR(sec, key, member, comment)                                                              \
    Field {                                                                                         \
        sec, key, Kind::Str, comment, [](const ExperimentConfig& c) { return std::optional<std::string>(c.member); }, \
            [](ExperimentConfig& c, const std::string& s) { c.member = trim(s); }                   \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        NUM("medium", "lambda", lambda0, "Pa"),
        NUM("medium", "mu", mu0, "Pa"),
        NUM("medium", "rho", rho0, "kg/m^3"),
        INT("medium", "dim", dim, "2 or 3"),
        Field{"inclusion", "center", Kind::NumList, "m",
              [](const ExperimentConfig& c) { return std::optional<std::string>(join_nums(c.center)); },
              [](ExperimentConfig& c, const std::string& s) { c.center = to_nums(s); }},
        NUM("inclusion", "epsilon", epsilon, "relative size"),
        NUM("inclusion", "rho1", rho1, "kg/m^3"),
        Field{"inclusion", "contrast", Kind::Str, "density | elasticity",
              [](const ExperimentConfig& c) { return std::optional<std::string>(contrast_name(c.contrast)); },
              [](ExperimentConfig& c, const std::string& s) {
                  const std::string t = trim(s);
                  if (t == "density")
                      c.contrast = ContrastKind::Density;
                  else if (t == "elasticity")
                      c.contrast = ContrastKind::Elasticity;
                  else
                      throw std::invalid_argument("expected density or elasticity, got " + t);
              }},
        NUM("inclusion", "emt_a", emt_a, "ball EMT coefficient a"),
        NUM("inclusion", "emt_b", emt_b, "ball EMT coefficient b"),
        OPTNUM("inclusion", "lambda1", lambda1, "Pa, optional"),
        OPTNUM("inclusion", "mu1", mu1, "Pa, optional"),
        NUM("inclusion", "guard", guard, "bound on epsilon * kappa_S"),
        Field{"inclusion", "strict_guard", Kind::Bool, "true | false",
              [](const ExperimentConfig& c) { return std::optional<std::string>(c.strict_guard ? "true" : "false"); },
              [](ExperimentConfig& c, const std::string& s) { c.strict_guard = to_bool(s); }},
        OPTNUM("trial", "rho2", rho2, "kg/m^3, optional"),
        OPTNUM("trial", "emt_a", trial_emt_a, "optional"),
        OPTNUM("trial", "emt_b", trial_emt_b, "optional"),
        NUM("wave", "omega", omega, "rad/s"),
        Field{"wave", "mode", Kind::Str, "P | S",
              [](const ExperimentConfig& c) { return std::optional<std::string>(mode_name(c.mode)); },
              [](ExperimentConfig& c, const std::string& s) {
                  const std::string t = trim(s);
                  if (t == "P")
                      c.mode = Mode::P;
                  else if (t == "S")
                      c.mode = Mode::S;
                  else
                      throw std::invalid_argument("expected P or S, got " + t);
              }},
        INT("wave", "n", n, "incident directions"),
        INT("quadrature", "circle_nodes", circle_nodes, "d = 2"),
        STR("quadrature", "sphere", sphere, "lebedev | fibonacci"),
        INT("quadrature", "sphere_order", sphere_order, "Lebedev degree"),
        INT("quadrature", "fibonacci_nodes", fibonacci_nodes, "Fibonacci lattice size"),
        Field{"grid", "center", Kind::NumList, "m, optional (defaults to the inclusion center)",
              [](const ExperimentConfig& c) {
                  return c.grid_center ? std::optional<std::string>(join_nums(*c.grid_center)) : std::nullopt;
              },
              [](ExperimentConfig& c, const std::string& s) { c.grid_center = to_nums(s); }},
        NUM("grid", "half_width", half_width, "units of lambda_S"),
        NUM("grid", "spacing", spacing, "units of lambda_S"),
        Field{"image", "indicators", Kind::StrList, "TDsingle, TDmulti, Wsingle, Wmulti",
              [](const ExperimentConfig& c) { return std::optional<std::string>(join_strs(c.indicators)); },
              [](ExperimentConfig& c, const std::string& s) { c.indicators = split_list(s); }},
        INT("image", "record", record, "record index for single-shot maps"),
        NUM("noise", "sigma_xi", sigma_xi, "far-field units"),
        INT("noise", "trials", noise_trials, "Monte Carlo draws"),
        STR("clutter", "kind", clutter, "none | density | shear"),
        NUM("clutter", "sigma", clutter_sigma, "relative (density) or Pa (shear)"),
        NUM("clutter", "corr_length", corr_length, "m"),
        NUM("clutter", "support_half_width", support_half_width, "m"),
        NUM("clutter", "spacing", field_spacing, "m"),
        INT("clutter", "trials", clutter_trials, "Monte Carlo draws"),
        Field{"verify", "separations", Kind::NumList, "wavelengths",
              [](const ExperimentConfig& c) { return std::optional<std::string>(join_nums(c.separations)); },
              [](ExperimentConfig& c, const std::string& s) { c.separations = to_nums(s); }},
        OPTNUM("verify", "tol", verify_tol, "optional"),
        Field{"run", "seed", Kind::Int, "",
              [](const ExperimentConfig& c) { return std::optional<std::string>(std::to_string(c.seed)); },
              [](ExperimentConfig& c, const std::string& s) {
                  const std::string t = trim(s);
                  std::size_t pos = 0;
                  if (!t.empty() && t[0] == '-') throw std::invalid_argument("seed must be non-negative");
                  c.seed = std::stoull(t, &pos);
                  if (pos != t.size()) throw std::invalid_argument("not an integer: " + s);
              }},
        STR("run", "out", out, "output directory"),
        INT("run", "threads", threads, "0 = hardware concurrency"),
    };
    return f;
}

#undef NUM
#undef OPTNUM
#undef INT
#undef STR

ExperimentConfig from_sections(const Sections& sec) {
    ExperimentConfig cfg;
    std::vector<std::string> errs;
    std::map<std::string, std::map<std::string, const Field*>> index;
    for (const auto& f : fields()) index[f.section][f.key] = &f;
    for (const auto& [s, kv] : sec) {
        const auto si = index.find(s);
        if (si == index.end()) {
            errs.push_back("unknown section [" + s + "]");
            continue;
        }
        for (const auto& [k, v] : kv) {
            const auto ki = si->second.find(k);
            if (ki == si->second.end()) {
                errs.push_back("unknown key " + s + "." + k);
                continue;
            }
            try {
                ki->second->set(cfg, v);
            } catch (const std::exception& e) {
                errs.push_back(s + "." + k + ": " + e.what());
            }
        }
    }
    for (const auto& e : cfg.check()) errs.push_back(e);
    if (!errs.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return cfg;
}

std::string json_scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt17(v.get<double>());
    throw std::invalid_argument("unsupported JSON value " + v.dump());
}

}  // namespace

Medium ExperimentConfig::medium() const { return Medium(lambda0, mu0, rho0, dim); }

Inclusion ExperimentConfig::inclusion() const {
    Inclusion inc;
    inc.center = RVec(dim);
    for (int k = 0; k < dim; ++k) inc.center[k] = center[k];
    inc.epsilon = epsilon;
    inc.rho1 = rho1;
    inc.emt = (emt_a == 0 && emt_b == 0) ? Emt(dim) : ball_emt(emt_a, emt_b, dim);
    inc.kind = contrast;
    inc.lambda1 = lambda1;
    inc.mu1 = mu1;
    inc.guard = guard;
    inc.strict_guard = strict_guard;
    return inc;
}

TrialParams ExperimentConfig::trial() const {
    const Inclusion inc = inclusion();
    TrialParams t = default_trial(inc, medium());
    if (rho2) t.rho2 = *rho2;
    if (trial_emt_a || trial_emt_b) t.emt = ball_emt(trial_emt_a.value_or(emt_a), trial_emt_b.value_or(emt_b), dim);
    return t;
}

DirectionSet ExperimentConfig::directions() const {
    if (dim == 2) return circle_rule(circle_nodes);
    return sphere == "fibonacci" ? fibonacci_sphere(fibonacci_nodes) : sphere_rule(sphere_order);
}

GridSpec ExperimentConfig::grid() const {
    const double lam = 2 * kPi / medium().kappa(Mode::S, omega);
    const auto& c = grid_center ? *grid_center : center;
    RVec cv(dim);
    for (int k = 0; k < dim; ++k) cv[k] = c[k];
    const double h = spacing * lam;
    return centered_grid(cv, h, static_cast<int>(std::lround(half_width / spacing)));
}

RandomFieldSpec ExperimentConfig::field_spec() const {
    RandomFieldSpec s;
    s.kind = clutter == "shear" ? FieldKind::Shear : FieldKind::Density;
    s.sigma = clutter_sigma;
    s.corr_length = corr_length;
    RVec cv(dim);
    for (int k = 0; k < dim; ++k) cv[k] = center[k];
    s.grid = centered_grid(cv, field_spacing, static_cast<int>(std::lround(support_half_width / field_spacing)));
    return s;
}

IncidentWave ExperimentConfig::first_wave() const {
    RVec th(dim);
    th[0] = 1;
    return {mode, th, 1, omega};
}

std::vector<std::string> ExperimentConfig::check() const {
    std::vector<std::string> e;
    if (dim != 2 && dim != 3) e.push_back("medium.dim must be 2 or 3");
    const bool dim_ok = dim == 2 || dim == 3;
    if (!(mu0 > 0)) e.push_back("medium.mu must be positive");
    if (!(rho0 > 0)) e.push_back("medium.rho must be positive");
    if (dim_ok && !(dim * lambda0 + 2 * mu0 > 0)) e.push_back("medium: d lambda + 2 mu must be positive");
    if (!(lambda0 + mu0 > 0)) e.push_back("medium: lambda + mu must be positive");
    if (static_cast<int>(center.size()) != dim) e.push_back("inclusion.center must have dim components");
    if (grid_center && static_cast<int>(grid_center->size()) != dim)
        e.push_back("grid.center must have dim components");
    if (!(omega > 0)) e.push_back("wave.omega must be positive");
    if (n < 1) e.push_back("wave.n must be at least 1");
    if (circle_nodes < 3) e.push_back("quadrature.circle_nodes must be at least 3");
    if (sphere != "lebedev" && sphere != "fibonacci") e.push_back("quadrature.sphere must be lebedev or fibonacci");
    if (sphere == "lebedev") {
        const auto orders = available_sphere_orders();
        if (std::find(orders.begin(), orders.end(), sphere_order) == orders.end())
            e.push_back("quadrature.sphere_order " + std::to_string(sphere_order) + " is not available");
    }
    if (fibonacci_nodes < 1) e.push_back("quadrature.fibonacci_nodes must be positive");
    if (!(half_width >= 0)) e.push_back("grid.half_width must be non-negative");
    if (!(spacing > 0)) e.push_back("grid.spacing must be positive");
    if (spacing > 0.1 + 1e-12) e.push_back("grid.spacing must not exceed 0.1 lambda_S");
    if (indicators.empty()) e.push_back("image.indicators must not be empty");
    for (const auto& s : indicators) try {
            indicator_from_name(s);
        } catch (const std::exception& ex) {
            e.push_back(std::string("image.indicators: ") + ex.what());
        }
    if (record < 0) e.push_back("image.record must be non-negative");
    if (!(sigma_xi >= 0)) e.push_back("noise.sigma_xi must be non-negative");
    if (noise_trials < 2) e.push_back("noise.trials must be at least 2");
    if (clutter != "none" && clutter != "density" && clutter != "shear")
        e.push_back("clutter.kind must be none, density or shear");
    if (!(clutter_sigma >= 0)) e.push_back("clutter.sigma must be non-negative");
    if (!(field_spacing > 0)) e.push_back("clutter.spacing must be positive");
    if (!(corr_length > 2 * field_spacing)) e.push_back("clutter.corr_length must exceed twice clutter.spacing");
    if (!(support_half_width > field_spacing)) e.push_back("clutter.support_half_width must exceed clutter.spacing");
    if (clutter_trials < 2) e.push_back("clutter.trials must be at least 2");
    if (separations.empty()) e.push_back("verify.separations must not be empty");
    for (double s : separations)
        if (!(s >= 0)) e.push_back("verify.separations must be non-negative");
    if (verify_tol && !(*verify_tol > 0)) e.push_back("verify.tol must be positive");
    if (threads < 0) e.push_back("run.threads must be non-negative");
    if (out.empty()) e.push_back("run.out must not be empty");

    // Module-level invariants of the derived objects.
    if (e.empty()) {
        const Medium m = medium();
        const Inclusion inc = inclusion();
        const auto ic = check_inclusion(inc, m, omega);
        for (const auto& x : ic.errors) e.push_back("inclusion: " + x);
        if (strict_guard)
            for (const auto& x : ic.warnings) e.push_back("inclusion: " + x);
        if (contrast == ContrastKind::Elasticity && inc.emt.is_zero())
            e.push_back("inclusion: elasticity contrast needs a nonzero EMT (emt_a, emt_b)");
        try {
            validate_trial(trial(), inc, m);
        } catch (const std::invalid_argument& ex) {
            e.push_back(ex.what());
        }
    }
    return e;
}

void ExperimentConfig::validate() const {
    const auto errs = check();
    if (errs.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& x : errs) msg += "\n  " + x;
    throw ValidationError(msg);
}

ExperimentConfig parse_config_ini(const std::string& text) {
    boost::property_tree::ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    Sections sec;
    for (const auto& [s, child] : pt) {
        if (child.empty()) throw ValidationError("config: key " + s + " outside of a section");
        for (const auto& [k, v] : child) sec[s][k] = v.get_value<std::string>();
    }
    return from_sections(sec);
}

ExperimentConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config: top level must be an object of sections");
    Sections sec;
    std::vector<std::string> errs;
    for (const auto& [s, obj] : j.items()) {
        if (!obj.is_object()) {
            errs.push_back("section " + s + " must be an object");
            continue;
        }
        for (const auto& [k, v] : obj.items()) try {
                if (v.is_array()) {
                    std::string joined;
                    for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + json_scalar(v[i]);
                    sec[s][k] = joined;
                } else {
                    sec[s][k] = json_scalar(v);
                }
            } catch (const std::exception& e) {
                errs.push_back(s + "." + k + ": " + e.what());
            }
    }
    if (!errs.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& x : errs) msg += "\n  " + x;
        throw ValidationError(msg);
    }
    return from_sections(sec);
}

ExperimentConfig load_config(const std::string& path) {
    const std::string text = read_text_file(path);
    const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    return json ? parse_config_json(text) : parse_config_ini(text);
}

std::string dump_config_ini(const ExperimentConfig& cfg) {
    std::ostringstream os;
    std::string current;
    for (const auto& f : fields()) {
        const auto v = f.get(cfg);
        if (!v) continue;
        if (current != f.section) {
            if (!current.empty()) os << "\n";
            os << "[" << f.section << "]\n";
            current = f.section;
        }
        if (*f.comment) os << "; " << f.key << ": " << f.comment << "\n";
        os << f.key << " = " << *v << "\n";
    }
    return os.str();
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : fields()) {
        const auto v = f.get(cfg);
        if (!v) continue;
        nlohmann::json& slot = j[f.section][f.key];
        switch (f.kind) {
            case Kind::Num: slot = parse_double(*v); break;
            case Kind::Int:
                if ((*v)[0] == '-')
                    slot = std::stoll(*v);
                else
                    slot = std::stoull(*v);
                break;
            case Kind::Bool: slot = *v == "true"; break;
            case Kind::Str: slot = *v; break;
            case Kind::NumList: slot = to_nums(*v); break;
            case Kind::StrList: slot = split_list(*v); break;
        }
    }
    return j;
}

}  // namespace etd
