#include <algorithm>
#include <cmath>
#include <sstream>

#include "pickmap/errors.hpp"
#include "pickmap/experiment.hpp"

namespace pickmap {

using nlohmann::json;

namespace {

struct RealTolerance {
  const char* name;
  double Tolerances::*field;
};

constexpr RealTolerance kRealTolerances[] = {
    {"eps_ball", &Tolerances::eps_ball},
    {"tol_node", &Tolerances::tol_node},
    {"tol_psd", &Tolerances::tol_psd},
    {"tol_herm", &Tolerances::tol_herm},
    {"tol_eig", &Tolerances::tol_eig},
    {"tol_eval", &Tolerances::tol_eval},
    {"tol_chol", &Tolerances::tol_chol},
    {"tol_transversal", &Tolerances::tol_transversal},
    {"tol_inj", &Tolerances::tol_inj},
    {"tol_proper", &Tolerances::tol_proper},
    {"tol_kernel", &Tolerances::tol_kernel},
    {"tol_oracle", &Tolerances::tol_oracle},
    {"tol_hs_rel", &Tolerances::tol_hs_rel},
    {"tol_sep", &Tolerances::tol_sep},
    {"tol_union", &Tolerances::tol_union},
    {"tol_cap", &Tolerances::tol_cap},
};

struct IntTolerance {
  const char* name;
  int Tolerances::*field;
};

constexpr IntTolerance kIntTolerances[] = {
    {"interior_radii", &Tolerances::interior_radii},
    {"interior_angles", &Tolerances::interior_angles},
};

[[noreturn]] void bad(const std::string& what) { throw InvalidInput("config: " + what); }

Complex parse_complex(const json& j, const std::string& where) {
  if (j.is_number())
    return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad(where + ": expected a number or a [re, im] pair");
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

std::vector<Complex> parse_complex_list(const json& j, const std::string& where) {
  if (!j.is_array())
    bad(where + ": expected an array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<BallPoint> parse_points(const json& j, const Tolerances& tol, const std::string& where) {
  if (!j.is_array())
    bad(where + ": expected an array of points");
  std::vector<BallPoint> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    out.emplace_back(parse_complex_list(j[i], at), tol.eps_ball);
  }
  return out;
}

json points_to_json(const std::vector<BallPoint>& pts) {
  json out = json::array();
  for (const auto& p : pts) {
    json row = json::array();
    for (const auto& c : p.coords())
      row.push_back(complex_to_json(c));
    out.push_back(std::move(row));
  }
  return out;
}

Tolerances parse_tolerances(const json& doc) {
  Tolerances tol;
  if (!doc.contains("tolerances"))
    return tol;
  const json& t = doc.at("tolerances");
  if (!t.is_object())
    bad("tolerances must be an object");
  for (const auto& [key, value] : t.items()) {
    bool known = false;
    for (const auto& rt : kRealTolerances)
      if (key == rt.name) {
        if (!value.is_number() || !(value.get<double>() >= 0.0))
          bad("tolerance " + key + " must be a nonnegative number");
        tol.*rt.field = value.get<double>();
        known = true;
      }
    for (const auto& it : kIntTolerances)
      if (key == it.name) {
        if (!value.is_number_integer() || value.get<int>() <= 0)
          bad("tolerance " + key + " must be a positive integer");
        tol.*it.field = value.get<int>();
        known = true;
      }
    if (!known)
      bad("unknown tolerance '" + key + "'");
  }
  return tol;
}

json tolerances_to_json(const Tolerances& tol) {
  json out = json::object();
  for (const auto& rt : kRealTolerances)
    out[rt.name] = tol.*rt.field;
  for (const auto& it : kIntTolerances)
    out[it.name] = tol.*it.field;
  return out;
}

Holomap parse_holomap(const json& j) {
  if (!j.is_array() || j.empty())
    bad("holomap: expected a nonempty list of components");
  std::vector<std::vector<Complex>> comps;
  for (std::size_t i = 0; i < j.size(); ++i)
    comps.push_back(parse_complex_list(j[i], "holomap[" + std::to_string(i) + "]"));
  return Holomap(std::move(comps));
}

json holomap_to_json(const Holomap& h) {
  json out = json::array();
  for (const auto& comp : h.components()) {
    json row = json::array();
    for (const auto& c : comp)
      row.push_back(complex_to_json(c));
    out.push_back(std::move(row));
  }
  return out;
}

MonomialMap parse_monomial(const json& j) {
  if (!j.is_object())
    bad("monomial: expected an object with p, q, alpha, beta");
  MonomialMap m;
  try {
    m.p = j.at("p").get<int>();
    m.q = j.at("q").get<int>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.contains("beta") ? j.at("beta").get<double>() : 1.0 - m.alpha;
  } catch (const json::exception& e) {
    bad(std::string("monomial: ") + e.what());
  }
  m.validate();
  return m;
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key))
    return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

const json& require(const json& doc, const char* key, ExperimentKind kind) {
  if (!doc.contains(key))
    bad(std::string(to_string(kind)) + " requires field '" + key + "'");
  return doc.at(key);
}

void parse_map(const json& doc, ExperimentConfig& c) {
  if (doc.contains("monomial")) {
    c.monomial = parse_monomial(doc.at("monomial"));
    c.holomap = c.monomial->to_holomap();
    c.echo["monomial"] = {{"p", c.monomial->p},
                          {"q", c.monomial->q},
                          {"alpha", c.monomial->alpha},
                          {"beta", c.monomial->beta}};
  } else if (doc.contains("holomap")) {
    c.holomap = parse_holomap(doc.at("holomap"));
    c.echo["holomap"] = holomap_to_json(*c.holomap);
  } else {
    bad(std::string(to_string(c.kind)) + " requires 'holomap' or 'monomial'");
  }
  c.grid_size = get_or<std::size_t>(doc, "grid_size", c.grid_size);
  if (c.grid_size == 0)
    bad("grid_size must be positive");
  c.echo["grid_size"] = c.grid_size;
}

AmbientPolynomial parse_target(const json& j, std::size_t dim) {
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    bad("target: expected an object with a 'terms' array");
  AmbientPolynomial poly;
  for (const auto& t : j.at("terms")) {
    AmbientPolynomial::Term term;
    term.coeff = parse_complex(t.at("coeff"), "target.coeff");
    term.powers = t.contains("powers") ? t.at("powers").get<std::vector<int>>()
                                       : std::vector<int>(dim, 0);
    if (term.powers.size() != dim)
      bad("target: every term needs one power per ambient coordinate");
    if (std::any_of(term.powers.begin(), term.powers.end(), [](int p) { return p < 0; }))
      bad("target: negative power");
    poly.terms.push_back(std::move(term));
  }
  if (poly.terms.empty())
    bad("target: no terms");
  return poly;
}

json target_to_json(const AmbientPolynomial& poly) {
  json terms = json::array();
  for (const auto& t : poly.terms)
    terms.push_back({{"coeff", complex_to_json(t.coeff)}, {"powers", t.powers}});
  return {{"terms", terms}};
}

} // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
  case ExperimentKind::PickNorm:
    return "pick-norm";
  case ExperimentKind::HolomapCheck:
    return "holomap-check";
  case ExperimentKind::OperatorR:
    return "operator-r";
  case ExperimentKind::ExtensionProbe:
    return "extension-probe";
  case ExperimentKind::DisjointUnion:
    return "disjoint-union";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::PickNorm, ExperimentKind::HolomapCheck, ExperimentKind::OperatorR,
                 ExperimentKind::ExtensionProbe, ExperimentKind::DisjointUnion})
    if (s == to_string(k))
      return k;
  bad("unknown experiment kind '" + s + "'");
}

Complex AmbientPolynomial::operator()(std::span<const Complex> w) const {
  Complex acc{0.0, 0.0};
  for (const auto& t : terms) {
    if (t.powers.size() != w.size())
      throw InvalidInput("ambient polynomial: dimension mismatch");
    Complex mono = t.coeff;
    for (std::size_t i = 0; i < w.size(); ++i)
      for (int e = 0; e < t.powers[i]; ++e)
        mono *= w[i];
    acc += mono;
  }
  return acc;
}

const Holomap& ExperimentConfig::map() const {
  if (!holomap)
    throw InvalidInput("experiment has no holomap");
  return *holomap;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object())
    bad("top level must be a JSON object");

  ExperimentConfig c;
  if (!doc.contains("kind") || !doc.at("kind").is_string())
    bad("missing string field 'kind'");
  c.kind = parse_kind(doc.at("kind").get<std::string>());
  c.tol = parse_tolerances(doc);
  c.seed = get_or<std::uint64_t>(doc, "seed", 0);
  c.output_dir = get_or<std::string>(doc, "output_dir", "");

  c.echo = json::object();
  c.echo["kind"] = to_string(c.kind);
  c.echo["seed"] = c.seed;
  c.echo["tolerances"] = tolerances_to_json(c.tol);

  switch (c.kind) {
  case ExperimentKind::PickNorm: {
    c.nodes = parse_points(require(doc, "nodes", c.kind), c.tol, "nodes");
    c.values = parse_complex_list(require(doc, "values", c.kind), "values");
    if (c.nodes.empty())
      bad("nodes must be nonempty");
    if (c.nodes.size() != c.values.size())
      bad("nodes and values must have the same length");
    common_dimension(c.nodes);
    c.echo["nodes"] = points_to_json(c.nodes);
    json vals = json::array();
    for (const auto& v : c.values)
      vals.push_back(complex_to_json(v));
    c.echo["values"] = vals;
    if (doc.contains("expect")) {
      const json& e = doc.at("expect");
      if (e.contains("norm"))
        c.expected_norm = e.at("norm").get<double>();
      c.expected_tol = get_or<double>(e, "tol", c.expected_tol);
      c.echo["expect"] = json::object();
      if (c.expected_norm)
        c.echo["expect"]["norm"] = *c.expected_norm;
      c.echo["expect"]["tol"] = c.expected_tol;
    }
    break;
  }
  case ExperimentKind::HolomapCheck: {
    parse_map(doc, c);
    c.boundary_normalized = get_or<bool>(doc, "boundary_normalized", c.monomial.has_value());
    c.echo["boundary_normalized"] = c.boundary_normalized;
    if (doc.contains("expect")) {
      const json& e = doc.at("expect");
      if (e.contains("margin"))
        c.expected_margin = e.at("margin").get<double>();
      c.expected_tol = get_or<double>(e, "tol", 1e-12);
      c.echo["expect"] = json::object();
      if (c.expected_margin)
        c.echo["expect"]["margin"] = *c.expected_margin;
      c.echo["expect"]["tol"] = c.expected_tol;
    }
    break;
  }
  case ExperimentKind::OperatorR: {
    parse_map(doc, c);
    c.modes = get_or<int>(doc, "modes", c.modes);
    if (c.modes <= 0)
      bad("modes must be positive");
    c.hs_refinement = get_or<bool>(doc, "hs_refinement", c.hs_refinement);
    c.echo["modes"] = c.modes;
    c.echo["hs_refinement"] = c.hs_refinement;
    break;
  }
  case ExperimentKind::ExtensionProbe: {
    parse_map(doc, c);
    c.target = parse_target(require(doc, "target", c.kind), c.map().dim());
    c.schedule = require(doc, "schedule", c.kind).get<std::vector<int>>();
    if (c.schedule.empty())
      bad("schedule must be nonempty");
    if (c.schedule.front() <= 0)
      bad("schedule entries must be positive");
    for (std::size_t i = 1; i < c.schedule.size(); ++i)
      if (c.schedule[i] <= c.schedule[i - 1])
        bad("schedule must be strictly increasing");
    if (doc.contains("cap"))
      c.cap = doc.at("cap").get<double>();
    c.echo["target"] = target_to_json(c.target);
    c.echo["schedule"] = c.schedule;
    if (c.cap)
      c.echo["cap"] = *c.cap;
    break;
  }
  case ExperimentKind::DisjointUnion: {
    const json& pieces = require(doc, "pieces", c.kind);
    if (!pieces.is_array() || pieces.empty())
      bad("pieces must be a nonempty array of node lists");
    json echo_pieces = json::array();
    std::vector<BallPoint> all;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      c.pieces.push_back(parse_points(pieces[i], c.tol, "pieces[" + std::to_string(i) + "]"));
      if (c.pieces.back().empty())
        bad("pieces must be nonempty");
      all.insert(all.end(), c.pieces.back().begin(), c.pieces.back().end());
      echo_pieces.push_back(points_to_json(c.pieces.back()));
    }
    common_dimension(all);
    c.trials = get_or<int>(doc, "trials", c.trials);
    if (c.trials <= 0)
      bad("trials must be positive");
    c.echo["pieces"] = echo_pieces;
    c.echo["trials"] = c.trials;
    break;
  }
  }
  return c;
}

} // namespace pickmap
