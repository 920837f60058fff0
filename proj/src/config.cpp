#include "granflow/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace granflow {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ConfigError(ConfigError::Kind::validate, what); }
[[noreturn]] void malformed(const std::string& what) { throw ConfigError(ConfigError::Kind::parse, what); }

// Reads one JSON object, remembering which keys were consumed so that
// anything left over can be rejected.
class Section {
 public:
  Section(const json& doc, std::string path) : path_(std::move(path)) {
    if (doc.is_null()) return;
    if (!doc.is_object()) malformed(path_ + ": expected an object");
    doc_ = &doc;
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0 || doc_ == nullptr) return;
    for (const auto& [key, value] : doc_->items())
      if (!seen_.contains(key)) malformed(path_ + ": unknown key '" + key + "'");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (doc_ == nullptr || !doc_->contains(key)) return;
    const json& v = (*doc_)[key];
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("not a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("not an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("not a number");
      } else {
        if (!v.is_string()) throw std::invalid_argument("not a string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      malformed(path_ + "." + key + ": " + e.what());
    }
  }

  const json& child(const char* key) {
    seen_.insert(key);
    static const json null_doc;
    if (doc_ == nullptr || !doc_->contains(key)) return null_doc;
    return (*doc_)[key];
  }

  const std::string& path() const { return path_; }

 private:
  const json* doc_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E, std::size_t N>
E parse_enum(const std::string& text, const std::array<std::pair<const char*, E>, N>& table,
             const std::string& where) {
  for (const auto& [name, value] : table)
    if (text == name) return value;
  malformed(where + ": unknown kind '" + text + "'");
}

template <class E, std::size_t N>
std::string enum_name(E value, const std::array<std::pair<const char*, E>, N>& table) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

constexpr std::array<std::pair<const char*, PorositySpec::Kind>, 2> kPorosityKinds{{
    {"constant", PorositySpec::Kind::constant},
    {"exponential", PorositySpec::Kind::exponential},
}};
constexpr std::array<std::pair<const char*, BodyForceSpec::Kind>, 5> kBodyForceKinds{{
    {"zero", BodyForceSpec::Kind::zero},
    {"constant", BodyForceSpec::Kind::constant},
    {"vortex", BodyForceSpec::Kind::vortex},
    {"gradient", BodyForceSpec::Kind::gradient},
    {"mms_newtonian", BodyForceSpec::Kind::mms_newtonian},
}};
constexpr std::array<std::pair<const char*, InitialVelocitySpec::Kind>, 3> kVelocityKinds{{
    {"zero", InitialVelocitySpec::Kind::zero},
    {"vortex", InitialVelocitySpec::Kind::vortex},
    {"mms_newtonian", InitialVelocitySpec::Kind::mms_newtonian},
}};
constexpr std::array<std::pair<const char*, InitialPorePressureSpec::Kind>, 3> kPoreKinds{{
    {"constant", InitialPorePressureSpec::Kind::constant},
    {"cosine", InitialPorePressureSpec::Kind::cosine},
    {"patch", InitialPorePressureSpec::Kind::patch},
}};
constexpr std::array<std::pair<const char*, AdvectionScheme>, 2> kAdvection{{
    {"upwind", AdvectionScheme::upwind},
    {"central", AdvectionScheme::central},
}};

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

// Manufactured profile f(s) = s(1-s)(1 + c s(1-s)) with f''(0) = (2c - 2) f'(0).
struct MmsProfile {
  double c;
  double f(double s) const {
    const double g = s - s * s;
    return g + c * g * g;
  }
  double f1(double s) const { return (1.0 - 2.0 * s) * (1.0 + 2.0 * c * (s - s * s)); }
  double f2(double s) const {
    const double g = s - s * s;
    return -2.0 * (1.0 + 2.0 * c * g) + 2.0 * c * (1.0 - 2.0 * s) * (1.0 - 2.0 * s);
  }
  double f3(double s) const { return -12.0 * c * (1.0 - 2.0 * s); }
};

MmsProfile mms_profile(const SimConfig& cfg) {
  // Navier slip nu f''(0) = gamma f'(0) with f'(0) = 1.
  return {1.0 + cfg.slip.gamma_star / (2.0 * cfg.rheology.nu_star)};
}

}  // namespace

double PorositySpec::operator()(double effective_pressure) const {
  if (kind == Kind::constant) return phi0;
  const double phi = phi_min + (phi_max - phi_min) * std::exp(-effective_pressure / pi_ref);
  return std::clamp(phi, phi_min, phi_max);
}

void SimConfig::validate() const {
  try {
    grid.validate();
    rheology.validate();
    slip.validate();
  } catch (const std::invalid_argument& e) {
    invalid(e.what());
  }
  if (!(time.dt > 0.0)) invalid("time.dt must be > 0");
  if (!(time.t_end >= time.dt * (1.0 - 1e-12))) invalid("time.t_end must be >= time.dt");
  if (!(time.picard_tol > 0.0 && time.picard_tol < 1.0)) invalid("time.picard_tol must lie in (0, 1)");
  if (!(time.poisson_tol > 0.0 && time.poisson_tol < 1.0)) invalid("time.poisson_tol must lie in (0, 1)");
  if (time.picard_max < 1) invalid("time.picard_max must be >= 1");
  if (time.anderson_depth < 0) invalid("time.anderson_depth must be >= 0");
  if (!(physics.alpha_drag > 0.0)) invalid("physics.alpha_drag must be > 0");
  if (!(physics.rho_s > 0.0) || !(physics.rho_f > 0.0)) invalid("physics densities must be > 0");
  if (!(physics.permeability > 0.0)) invalid("physics.permeability must be > 0");
  if (porosity.kind == PorositySpec::Kind::constant && !(porosity.phi0 >= 0.0 && porosity.phi0 <= 1.0))
    invalid("porosity.phi0 must lie in [0, 1]");
  if (porosity.kind == PorositySpec::Kind::exponential &&
      !(porosity.phi_min >= 0.0 && porosity.phi_min <= porosity.phi_max && porosity.phi_max <= 1.0 &&
        porosity.pi_ref > 0.0))
    invalid("porosity: need 0 <= phi_min <= phi_max <= 1 and pi_ref > 0");
  const bool unit_square = grid.lx == 1.0 && grid.ly == 1.0;
  if ((body_force.kind == BodyForceSpec::Kind::mms_newtonian ||
       initial_velocity.kind == InitialVelocitySpec::Kind::mms_newtonian) &&
      !unit_square)
    invalid("mms_newtonian data is defined on the unit square only");
  if (!finite_all({body_force.amplitude, body_force.bx, body_force.by, lithostatic.value,
                   lithostatic.gradient, lithostatic.rate, initial_velocity.amplitude,
                   initial_pore_pressure.value, initial_pore_pressure.amplitude,
                   initial_pore_pressure.inside}))
    invalid("forcing and initial data must be finite");
  if (output.snapshot_every < 0) invalid("output.snapshot_every must be >= 0");
}

std::int64_t SimConfig::step_count() const {
  return std::max<std::int64_t>(1, std::llround(time.t_end / time.dt));
}

SimConfig config_from_json(const json& doc) {
  SimConfig cfg;
  {
    Section root(doc, "config");
    root.read("name", cfg.name);
    {
      Section s(root.child("grid"), "grid");
      s.read("nx", cfg.grid.nx);
      s.read("ny", cfg.grid.ny);
      s.read("lx", cfg.grid.lx);
      s.read("ly", cfg.grid.ly);
    }
    {
      Section s(root.child("rheology"), "rheology");
      s.read("nu_star", cfg.rheology.nu_star);
      s.read("delta_star", cfg.rheology.delta_star);
      s.read("q_star", cfg.rheology.q_star);
      s.read("q_exponent", cfg.rheology.q_exponent);
      s.read("reg_n", cfg.rheology.reg_n);
    }
    {
      Section s(root.child("slip"), "slip");
      s.read("s_star", cfg.slip.s_star);
      s.read("beta_star", cfg.slip.beta_star);
      s.read("gamma_star", cfg.slip.gamma_star);
    }
    {
      Section s(root.child("time"), "time");
      s.read("dt", cfg.time.dt);
      s.read("t_end", cfg.time.t_end);
      s.read("picard_tol", cfg.time.picard_tol);
      s.read("picard_max", cfg.time.picard_max);
      s.read("anderson_depth", cfg.time.anderson_depth);
      s.read("poisson_tol", cfg.time.poisson_tol);
    }
    {
      Section s(root.child("physics"), "physics");
      s.read("alpha_drag", cfg.physics.alpha_drag);
      s.read("rho_s", cfg.physics.rho_s);
      s.read("rho_f", cfg.physics.rho_f);
      s.read("permeability", cfg.physics.permeability);
      s.read("include_dt_ps", cfg.physics.include_dt_ps);
      std::string scheme = enum_name(cfg.physics.advection, kAdvection);
      s.read("advection", scheme);
      cfg.physics.advection = parse_enum(scheme, kAdvection, "physics.advection");
    }
    {
      Section s(root.child("porosity"), "porosity");
      std::string kind = enum_name(cfg.porosity.kind, kPorosityKinds);
      s.read("kind", kind);
      cfg.porosity.kind = parse_enum(kind, kPorosityKinds, "porosity.kind");
      s.read("phi0", cfg.porosity.phi0);
      s.read("phi_min", cfg.porosity.phi_min);
      s.read("phi_max", cfg.porosity.phi_max);
      s.read("pi_ref", cfg.porosity.pi_ref);
    }
    {
      Section forcing(root.child("forcing"), "forcing");
      {
        Section s(forcing.child("body_force"), "forcing.body_force");
        std::string kind = enum_name(cfg.body_force.kind, kBodyForceKinds);
        s.read("kind", kind);
        cfg.body_force.kind = parse_enum(kind, kBodyForceKinds, "forcing.body_force.kind");
        s.read("amplitude", cfg.body_force.amplitude);
        s.read("bx", cfg.body_force.bx);
        s.read("by", cfg.body_force.by);
      }
      {
        Section s(forcing.child("lithostatic"), "forcing.lithostatic");
        s.read("value", cfg.lithostatic.value);
        s.read("gradient", cfg.lithostatic.gradient);
        s.read("rate", cfg.lithostatic.rate);
      }
    }
    {
      Section initial(root.child("initial"), "initial");
      {
        Section s(initial.child("velocity"), "initial.velocity");
        std::string kind = enum_name(cfg.initial_velocity.kind, kVelocityKinds);
        s.read("kind", kind);
        cfg.initial_velocity.kind = parse_enum(kind, kVelocityKinds, "initial.velocity.kind");
        s.read("amplitude", cfg.initial_velocity.amplitude);
      }
      {
        Section s(initial.child("pore_pressure"), "initial.pore_pressure");
        auto& pp = cfg.initial_pore_pressure;
        std::string kind = enum_name(pp.kind, kPoreKinds);
        s.read("kind", kind);
        pp.kind = parse_enum(kind, kPoreKinds, "initial.pore_pressure.kind");
        s.read("value", pp.value);
        s.read("amplitude", pp.amplitude);
        s.read("inside", pp.inside);
        s.read("x0", pp.x0);
        s.read("x1", pp.x1);
        s.read("y0", pp.y0);
        s.read("y1", pp.y1);
      }
    }
    {
      Section s(root.child("output"), "output");
      s.read("snapshot_every", cfg.output.snapshot_every);
      s.read("write_vtk", cfg.output.write_vtk);
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    malformed("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const SimConfig& cfg) {
  const auto& pp = cfg.initial_pore_pressure;
  return json{
      {"name", cfg.name},
      {"grid", {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"lx", cfg.grid.lx}, {"ly", cfg.grid.ly}}},
      {"rheology",
       {{"nu_star", cfg.rheology.nu_star},
        {"delta_star", cfg.rheology.delta_star},
        {"q_star", cfg.rheology.q_star},
        {"q_exponent", cfg.rheology.q_exponent},
        {"reg_n", cfg.rheology.reg_n}}},
      {"slip",
       {{"s_star", cfg.slip.s_star}, {"beta_star", cfg.slip.beta_star}, {"gamma_star", cfg.slip.gamma_star}}},
      {"time",
       {{"dt", cfg.time.dt},
        {"t_end", cfg.time.t_end},
        {"picard_tol", cfg.time.picard_tol},
        {"picard_max", cfg.time.picard_max},
        {"anderson_depth", cfg.time.anderson_depth},
        {"poisson_tol", cfg.time.poisson_tol}}},
      {"physics",
       {{"alpha_drag", cfg.physics.alpha_drag},
        {"rho_s", cfg.physics.rho_s},
        {"rho_f", cfg.physics.rho_f},
        {"permeability", cfg.physics.permeability},
        {"include_dt_ps", cfg.physics.include_dt_ps},
        {"advection", enum_name(cfg.physics.advection, kAdvection)}}},
      {"porosity",
       {{"kind", enum_name(cfg.porosity.kind, kPorosityKinds)},
        {"phi0", cfg.porosity.phi0},
        {"phi_min", cfg.porosity.phi_min},
        {"phi_max", cfg.porosity.phi_max},
        {"pi_ref", cfg.porosity.pi_ref}}},
      {"forcing",
       {{"body_force",
         {{"kind", enum_name(cfg.body_force.kind, kBodyForceKinds)},
          {"amplitude", cfg.body_force.amplitude},
          {"bx", cfg.body_force.bx},
          {"by", cfg.body_force.by}}},
        {"lithostatic",
         {{"value", cfg.lithostatic.value},
          {"gradient", cfg.lithostatic.gradient},
          {"rate", cfg.lithostatic.rate}}}}},
      {"initial",
       {{"velocity",
         {{"kind", enum_name(cfg.initial_velocity.kind, kVelocityKinds)},
          {"amplitude", cfg.initial_velocity.amplitude}}},
        {"pore_pressure",
         {{"kind", enum_name(pp.kind, kPoreKinds)},
          {"value", pp.value},
          {"amplitude", pp.amplitude},
          {"inside", pp.inside},
          {"x0", pp.x0},
          {"x1", pp.x1},
          {"y0", pp.y0},
          {"y1", pp.y1}}}}},
      {"output", {{"snapshot_every", cfg.output.snapshot_every}, {"write_vtk", cfg.output.write_vtk}}},
  };
}

std::string config_hash(const SimConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  std::ostringstream hex;
  hex << std::hex;
  for (unsigned int k = 0; k < length; ++k)
    hex << ((digest[k] >> 4) & 0xF) << (digest[k] & 0xF);
  return hex.str();
}

Vec2 mms_velocity(const SimConfig& cfg, double amplitude, double x, double y) {
  const MmsProfile f = mms_profile(cfg);
  return {amplitude * f.f(x) * f.f1(y), -amplitude * f.f1(x) * f.f(y)};
}

Vec2 body_force(const SimConfig& cfg, double /*t*/, double x, double y) {
  using std::numbers::pi;
  const auto& b = cfg.body_force;
  const double lx = cfg.grid.lx, ly = cfg.grid.ly;
  switch (b.kind) {
    case BodyForceSpec::Kind::zero:
      return {};
    case BodyForceSpec::Kind::constant:
      return {b.bx, b.by};
    case BodyForceSpec::Kind::vortex:
      return {b.amplitude * (pi / ly) * std::sin(pi * x / lx) * std::cos(pi * y / ly),
              -b.amplitude * (pi / lx) * std::cos(pi * x / lx) * std::sin(pi * y / ly)};
    case BodyForceSpec::Kind::gradient:
      return {-b.amplitude * (pi / lx) * std::sin(pi * x / lx) * std::cos(pi * y / ly),
              -b.amplitude * (pi / ly) * std::cos(pi * x / lx) * std::sin(pi * y / ly)};
    case BodyForceSpec::Kind::mms_newtonian: {
      // Steady u = A f(x) f'(y), v = -A f'(x) f(y), zero pressure:
      // b = (v . grad) v - (nu / rho) lap v.
      const MmsProfile f = mms_profile(cfg);
      const double A = b.amplitude;
      const double u = A * f.f(x) * f.f1(y), v = -A * f.f1(x) * f.f(y);
      const double ux = A * f.f1(x) * f.f1(y), uy = A * f.f(x) * f.f2(y);
      const double vx = -A * f.f2(x) * f.f(y), vy = -A * f.f1(x) * f.f1(y);
      const double lap_u = A * (f.f2(x) * f.f1(y) + f.f(x) * f.f3(y));
      const double lap_v = -A * (f.f3(x) * f.f(y) + f.f1(x) * f.f2(y));
      const double nu = cfg.rheology.nu_star / cfg.physics.rho_s;
      return {u * ux + v * uy - nu * lap_u, u * vx + v * vy - nu * lap_v};
    }
  }
  return {};
}

double lithostatic_pressure(const SimConfig& cfg, double t, double /*x*/, double y) {
  const auto& l = cfg.lithostatic;
  return l.value + l.gradient * (cfg.grid.ly - y) + l.rate * t;
}

VectorField body_force_field(const SimConfig& cfg, double t) {
  VectorField b = VectorField::sample(cfg.grid, [&](double x, double y) { return body_force(cfg, t, x, y); });
  return b;
}

ScalarField lithostatic_field(const SimConfig& cfg, double t) {
  return ScalarField::sample(cfg.grid, [&](double x, double y) { return lithostatic_pressure(cfg, t, x, y); });
}

VectorField initial_velocity(const SimConfig& cfg) {
  using std::numbers::pi;
  const auto& iv = cfg.initial_velocity;
  const double lx = cfg.grid.lx, ly = cfg.grid.ly;
  switch (iv.kind) {
    case InitialVelocitySpec::Kind::zero:
      return VectorField(cfg.grid);
    case InitialVelocitySpec::Kind::vortex:
      return VectorField::from_streamfunction(cfg.grid, [&](double x, double y) {
        return iv.amplitude * std::sin(pi * x / lx) * std::sin(pi * y / ly);
      });
    case InitialVelocitySpec::Kind::mms_newtonian: {
      VectorField v = VectorField::sample(cfg.grid, [&](double x, double y) {
        return mms_velocity(cfg, iv.amplitude, x, y);
      });
      v.zero_boundary_normal();
      return v;
    }
  }
  return VectorField(cfg.grid);
}

ScalarField initial_pore_pressure(const SimConfig& cfg) {
  using std::numbers::pi;
  const auto& pp = cfg.initial_pore_pressure;
  const double lx = cfg.grid.lx;
  return ScalarField::sample(cfg.grid, [&](double x, double y) {
    switch (pp.kind) {
      case InitialPorePressureSpec::Kind::constant:
        return pp.value;
      case InitialPorePressureSpec::Kind::cosine:
        return pp.value + pp.amplitude * std::cos(pi * x / lx);
      case InitialPorePressureSpec::Kind::patch:
        return (x >= pp.x0 && x <= pp.x1 && y >= pp.y0 && y <= pp.y1) ? pp.inside : pp.value;
    }
    return pp.value;
  });
}

}  // namespace granflow
