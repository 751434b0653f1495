#include "cwave/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "cwave/io.hpp"

namespace cwave {

namespace {

class Section {
public:
    Section(const toml::table* t, std::string name, std::string origin)
        : t_(t), name_(std::move(name)), origin_(std::move(origin)) {}

    bool present() const { return t_ != nullptr; }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!t_) return;
        const toml::node* n = t_->get(key);
        if (!n) return;
        if constexpr (std::is_same_v<T, bool>) {
            if (auto v = n->value_exact<bool>()) return void(out = *v);
        } else if constexpr (std::is_integral_v<T>) {
            if (auto v = n->value_exact<int64_t>()) {
                if (*v < 0 && std::is_unsigned_v<T>) fail(key, "must be non-negative");
                return void(out = (T)*v);
            }
        } else {
            if (auto v = n->value<double>()) return void(out = *v);
        }
        fail(key, "has the wrong type");
    }

    void get(const char* key, RVec& out) {
        seen_.insert(key);
        if (!t_) return;
        const toml::node* n = t_->get(key);
        if (!n) return;
        const toml::array* a = n->as_array();
        if (!a) fail(key, "must be an array of numbers");
        out.clear();
        for (const toml::node& e : *a) {
            auto v = e.value<double>();
            if (!v) fail(key, "must be an array of numbers");
            out.push_back(*v);
        }
    }

    // every key present must have been asked for
    void finish() const {
        if (!t_) return;
        for (const auto& [k, v] : *t_)
            if (!seen_.count(std::string(k.str())))
                throw ConfigError(origin_ + ": unknown key '" + std::string(k.str()) + "' in [" + name_ + "]");
    }

private:
    [[noreturn]] void fail(const char* key, const char* what) const {
        throw ConfigError(origin_ + ": [" + name_ + "] " + key + " " + what);
    }
    const toml::table* t_;
    std::string name_, origin_;
    std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << origin << ": " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(os.str());
    }
    static const std::set<std::string> known{"grid", "physics", "initial", "fitting", "physical"};
    for (const auto& [k, v] : root) {
        if (!known.count(std::string(k.str())))
            throw ConfigError(origin + ": unknown section [" + std::string(k.str()) + "]");
        if (!v.is_table()) throw ConfigError(origin + ": '" + std::string(k.str()) + "' must be a section");
    }
    auto sec = [&](const char* name) { return Section(root[name].as_table(), name, origin); };

    RunConfig c;
    {
        Section s = sec("grid");
        s.get("half_width", c.half_width);
        s.get("n", c.n);
        s.finish();
    }
    {
        Section s = sec("physics");
        s.get("p", c.p);
        s.finish();
    }
    {
        Section s = sec("initial");
        s.get("zeta", c.initial.zeta);
        s.get("theta", c.initial.theta);
        s.get("perturbation", c.perturbation);
        s.get("seed", c.seed);
        s.finish();
    }
    {
        Section s = sec("fitting");
        ExperimentOptions& e = c.experiment;
        s.get("s_end", e.s_end);
        s.get("every", e.fit_every);
        s.get("dt", e.pde.dt);
        s.get("sponge_width", e.pde.sponge_width);
        s.get("sponge_strength", e.pde.sponge_strength);
        s.get("boundary_margin", e.pde.boundary_margin);
        s.get("tol", e.mod.tol);
        s.get("max_iter", e.mod.max_iter);
        s.get("control_unstable", e.control_unstable);
        s.get("toda_min_gap", c.toda_min_gap);
        s.get("toda_skip", c.toda_skip);
        s.get("toda_half_window", c.toda_half_window);
        s.finish();
    }
    {
        Section s = sec("physical");
        c.has_physical = s.present();
        PhysicalOptions& o = c.physical;
        o.p = c.p;
        s.get("dx", o.dx);
        s.get("half_width", o.half_width);
        s.get("t_end", o.t_end);
        s.get("cfl", o.cfl);
        s.get("eta", o.eta);
        s.get("ceiling", o.ceiling);
        s.get("fit_floor", o.fit_floor);
        s.get("track_radius", o.track_radius);
        s.get("richardson", o.richardson);
        s.get("amplitude", c.profile.amplitude);
        s.get("width", c.profile.width);
        s.get("phase", c.profile.phase);
        s.get("m_lo", c.m_lo);
        s.get("m_hi", c.m_hi);
        s.finish();
    }

    if (!(c.p > 1.0)) throw ConfigError(origin + ": [physics] p must exceed 1");
    if (c.n < 16) throw ConfigError(origin + ": [grid] n too small");
    if (c.half_width < 0) throw ConfigError(origin + ": [grid] half_width must be non-negative");
    if (c.initial.zeta.size() != c.initial.theta.size())
        throw ConfigError(origin + ": [initial] zeta and theta differ in length");
    if (!c.initial.zeta.empty()) {
        try {
            c.initial.validate();
        } catch (const std::exception& e) {
            throw ConfigError(origin + ": [initial] " + e.what());
        }
    }
    if (!(c.experiment.fit_every > 0) || !(c.experiment.pde.dt > 0))
        throw ConfigError(origin + ": [fitting] every and dt must be positive");
    if (c.m_lo > c.m_hi) throw ConfigError(origin + ": [physical] m_lo exceeds m_hi");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

nlohmann::json to_json(const RunConfig& c) {
    const ExperimentOptions& e = c.experiment;
    nlohmann::json j = {
        {"grid", {{"half_width", c.half_width}, {"n", c.n}}},
        {"physics", {{"p", c.p}}},
        {"initial",
         {{"zeta", num(c.initial.zeta)},
          {"theta", num(c.initial.theta)},
          {"perturbation", c.perturbation},
          {"seed", c.seed}}},
        {"fitting",
         {{"s_end", e.s_end},
          {"every", e.fit_every},
          {"dt", e.pde.dt},
          {"sponge_width", e.pde.sponge_width},
          {"sponge_strength", e.pde.sponge_strength},
          {"boundary_margin", e.pde.boundary_margin},
          {"tol", e.mod.tol},
          {"max_iter", e.mod.max_iter},
          {"control_unstable", e.control_unstable},
          {"toda_min_gap", c.toda_min_gap},
          {"toda_skip", c.toda_skip},
          {"toda_half_window", c.toda_half_window}}}};
    if (c.has_physical) {
        const PhysicalOptions& o = c.physical;
        j["physical"] = {{"dx", o.dx},
                         {"half_width", o.half_width},
                         {"t_end", o.t_end},
                         {"cfl", o.cfl},
                         {"eta", o.eta},
                         {"ceiling", o.ceiling},
                         {"fit_floor", o.fit_floor},
                         {"track_radius", o.track_radius},
                         {"richardson", o.richardson},
                         {"amplitude", c.profile.amplitude},
                         {"width", c.profile.width},
                         {"phase", c.profile.phase},
                         {"m_lo", c.m_lo},
                         {"m_hi", c.m_hi}};
    }
    return j;
}

}  // namespace cwave
