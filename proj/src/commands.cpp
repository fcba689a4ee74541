#include "dmod/commands.hpp"

#include <algorithm>
#include <sstream>

#include "dmod/builtins.hpp"
#include "dmod/duality.hpp"
#include "dmod/errors.hpp"
#include "dmod/geometry.hpp"
#include "dmod/involutive.hpp"

namespace dmod {

namespace {

Document equations(const OperatorMatrix& m) {
  Document out = Document::array();
  for (const auto& e : m.equations()) out.push_back(e + " = 0");
  return out;
}

Document labelled(const OperatorMatrix& m) {
  Document out = Document::array();
  auto eqs = m.equations();
  for (std::size_t r = 0; r < eqs.size(); ++r) out.push_back(m.row_label(r) + ": " + eqs[r] + " = 0");
  return out;
}

bool leads_negative(const OperatorMatrix& m, std::size_t r) {
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!m.at(r, c).is_zero()) return m.at(r, c).terms().front().second.numerator().leading_coefficient() < 0;
  return false;
}

// Each row scaled so that its first term has a positive coefficient.
OperatorMatrix positive_rows(OperatorMatrix m) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (leads_negative(m, r))
      for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = -m.at(r, c);
  return m;
}

// Potentials flipped (whole columns) so that the first row reads positively.
OperatorMatrix positive_columns(OperatorMatrix m) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (m.at(r, c).is_zero()) continue;
      if (m.at(r, c).terms().front().second.numerator().leading_coefficient() < 0)
        for (std::size_t k = 0; k < m.rows(); ++k) m.at(k, c) = -m.at(k, c);
      break;
    }
  }
  return m;
}

std::string plural(std::size_t k, const std::string& word) {
  return std::to_string(k) + " " + word + (k == 1 ? "" : "s");
}

// Rows written as label = expression (parametrizations, inverses).
Document assignments(const OperatorMatrix& m) {
  Document out = Document::array();
  auto eqs = m.equations();
  for (std::size_t r = 0; r < eqs.size(); ++r) out.push_back(m.row_label(r) + " = " + eqs[r]);
  return out;
}

std::string tuple(const std::vector<std::size_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

Document row_doc(const Row& row, const std::vector<std::string>& labels) {
  OperatorMatrix m(nullptr, 0, row.size());
  m.append_row(row);
  m.col_labels() = labels;
  return m.equations().front();
}

CompletionOptions completion(const RunOptions& o) {
  CompletionOptions c;
  c.order_cap = o.cap;
  return c;
}

Document torsion_doc(const std::vector<TorsionElement>& t, const OperatorMatrix& d) {
  Document out = Document::array();
  for (const auto& e : t) {
    Document g;
    g["element"] = row_doc(e.representative, d.col_labels());
    Document ann = Document::array();
    for (const auto& a : e.annihilators) ann.push_back(a.to_string("z"));
    g["annihilators"] = ann;
    g["derived"] = e.derived;
    out.push_back(g);
  }
  return out;
}

// y_i' = A y + B u with constant coefficients, when the system has that shape.
bool state_form(const OperatorMatrix& d, std::vector<std::vector<Rational>>& a, std::vector<std::vector<Rational>>& b,
                std::vector<std::size_t>& states, std::vector<std::size_t>& inputs) {
  if (d.n() != 1) return false;
  std::vector<int> state_row(d.cols(), -1);
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c) {
      const auto& e = d.at(r, c);
      if (e.order() > 1) return false;
      for (const auto& [mu, s] : e.terms())
        if (!s.is_constant()) return false;
      if (e.order() == 1) {
        if (state_row[c] >= 0) return false;
        state_row[c] = static_cast<int>(r);
      }
    }
  states.clear();
  inputs.clear();
  for (std::size_t c = 0; c < d.cols(); ++c) (state_row[c] >= 0 ? states : inputs).push_back(c);
  if (states.size() != d.rows()) return false;
  std::size_t k = states.size();
  a.assign(k, std::vector<Rational>(k));
  b.assign(k, std::vector<Rational>(inputs.size()));
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t r = static_cast<std::size_t>(state_row[states[i]]);
    Rational lead = d.at(r, states[i]).coefficient(MultiIndex::unit(1)).constant();
    for (std::size_t j = 0; j < k; ++j) a[i][j] = -d.at(r, states[j]).coefficient(MultiIndex{}).constant() / lead;
    for (std::size_t j = 0; j < inputs.size(); ++j)
      b[i][j] = -d.at(r, inputs[j]).coefficient(MultiIndex{}).constant() / lead;
  }
  return true;
}

Document cmd_cc(const RunOptions& o, const SystemDecl& s) {
  auto cc = positive_rows(compatibility_conditions(s.op, completion(o)));
  Document doc;
  doc["summary"] = plural(cc.rows(), "compatibility condition");
  doc["count"] = cc.rows();
  doc["cc"] = equations(cc);
  return doc;
}

Document cmd_adjoint(const RunOptions&, const SystemDecl& s) {
  auto ad = formal_adjoint(s.op);
  Document doc;
  doc["summary"] = "formal adjoint: " + plural(ad.rows(), "equation") + " in " + plural(ad.cols(), "unknown");
  doc["adjoint"] = labelled(ad);
  return doc;
}

Document cmd_involutive(const RunOptions& o, const SystemDecl& s) {
  auto basis = InvolutiveBasis::of(s.op, completion(o));
  auto gens = basis.generators();
  gens.col_labels() = s.op.col_labels();
  Document doc;
  Document g = Document::array();
  auto eqs = gens.equations();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Document e;
    e["equation"] = eqs[i] + " = 0";
    std::string mult;
    for (auto v : basis.multiplicative(i)) mult += (mult.empty() ? "" : ",") + std::to_string(v);
    e["multiplicative"] = mult;
    g.push_back(e);
  }
  auto jets = JetSystem::from_operator(s.op);
  auto classes = involutivity_classes(jets, o.seed);
  auto fi = formal_integrability_test(jets, o.steps, o.seed);
  doc["summary"] = "involutive basis: " + std::to_string(basis.size()) + " generators; symbol classes " +
                   tuple(classes.beta) + "; Cartan test " + (classes.cartan ? "passed" : "failed") + "; " +
                   (fi.formally_integrable ? "formally integrable" : "not formally integrable");
  doc["basis"] = g;
  doc["certified_prolongations"] = basis.certified_prolongations();
  Document c;
  c["beta"] = classes.beta;
  c["prolonged_rank"] = classes.prolonged_rank;
  c["cartan_bound"] = classes.cartan_bound;
  c["cartan"] = classes.cartan;
  c["cc_count"] = classes.cc_count;
  c["coordinates_changed"] = classes.coordinates_changed;
  doc["classes"] = c;
  Document f;
  f["formally_integrable"] = fi.formally_integrable;
  f["involutive_at"] = fi.involutive_at;
  Document steps = Document::array();
  for (const auto& st : fi.steps) {
    Document e;
    e["r"] = st.r;
    e["clean"] = st.clean;
    if (!st.clean) {
      e["new_order"] = st.new_order;
      e["new_equation"] = st.new_equation;
    }
    e["symbol_involutive"] = st.symbol_involutive;
    steps.push_back(e);
  }
  f["steps"] = steps;
  doc["formal_integrability"] = f;
  return doc;
}

Document cmd_dims(const RunOptions& o, const SystemDecl& s) {
  auto jets = JetSystem::from_operator(s.op);
  auto t = bundle_dims(jets, o.seed);
  Document doc;
  doc["summary"] = "dims: C = " + tuple(t.c) + ", C(E) = " + tuple(t.ce) + ", F = " + tuple(t.f);
  doc["n"] = t.n;
  doc["m"] = t.m;
  doc["q"] = t.q;
  doc["dim_J_q"] = t.jq;
  doc["dim_R_q"] = t.rq;
  doc["dim_g_q"] = t.gq;
  doc["dim_g_q+1"] = t.gq1;
  doc["C"] = t.c;
  doc["C(E)"] = t.ce;
  doc["F"] = t.f;
  auto fam = symbol_family(jets, 1, o.seed);
  Document g = Document::array();
  for (const auto& sp : fam) g.push_back(sp.dim());
  doc["symbol_dims"] = g;
  doc["symbol_confirmed"] = fam.back().confirmed;
  Document h = Document::array();
  for (const auto& e : delta_cohomology(fam, t.n, t.m).entries) {
    if (e.h == 0) continue;
    Document x;
    x["p"] = e.p;
    x["s"] = e.s;
    x["z"] = e.z;
    x["b"] = e.b;
    x["h"] = e.h;
    h.push_back(x);
  }
  doc["delta_cohomology_nonzero"] = h;
  return doc;
}

Document cmd_spencer(const RunOptions& o, const SystemDecl& s) {
  auto jets = JetSystem::from_operator(s.op);
  auto fs = first_spencer_operator(jets, o.seed);
  Document doc;
  doc["summary"] = "first Spencer operator: " + std::to_string(fs.op.rows()) + " equations in " +
                   std::to_string(fs.op.cols()) + " parametric jets";
  doc["parametric"] = fs.op.col_labels();
  doc["spencer"] = labelled(fs.op);
  doc["adjoint"] = labelled(formal_adjoint(fs.op));
  return doc;
}

DualityOptions duality(const RunOptions& o) {
  DualityOptions d;
  d.completion = completion(o);
  return d;
}

Document cmd_paramtest(const RunOptions& o, const SystemDecl& s) {
  auto v = double_duality_test(s.op, duality(o));
  Document doc;
  if (v.torsion_free) {
    doc["summary"] = "TORSION-FREE; parametrization: " + plural(v.parametrization.rows(), "equation") + " in " +
                     plural(v.parametrization.cols(), "potential");
  } else {
    doc["summary"] = "TORSION; " + plural(v.torsion.size(), "torsion generator");
  }
  doc["verdict"] = v.torsion_free ? "torsion_free" : "has_torsion";
  doc["adjoint_cc_count"] = v.adjoint_cc.rows();
  doc["parametrization"] = assignments(positive_columns(v.parametrization));
  doc["dprime_count"] = v.dprime.rows();
  if (v.witness) doc["witness"] = row_doc(*v.witness, s.op.col_labels());
  doc["torsion"] = torsion_doc(v.torsion, s.op);
  return doc;
}

Document cmd_torsion(const RunOptions& o, const SystemDecl& s) {
  auto t = torsion_elements(s.op, duality(o));
  Document doc;
  doc["summary"] = t.empty() ? "no torsion" : plural(t.size(), "torsion generator");
  doc["verdict"] = t.empty() ? "torsion_free" : "has_torsion";
  doc["torsion"] = torsion_doc(t, s.op);
  return doc;
}

Document cmd_kalman(const RunOptions& o, const SystemDecl& s) {
  if (s.op.n() != 1) throw PreconditionError("kalman needs a single independent variable");
  Document doc;
  auto inj = adjoint_injectivity_test(s.op);
  bool controllable = inj.injective && inj.obstruction.is_constant();
  std::string verdict = controllable ? "CONTROLLABLE" : inj.injective ? "CONTROLLABLE unless the obstruction vanishes"
                                                                      : "NOT CONTROLLABLE";
  doc["adjoint_injective"] = inj.injective;
  doc["obstruction"] = inj.obstruction.to_string();
  doc["zero_order"] = inj.zero_order;
  std::vector<std::vector<Rational>> a, b;
  std::vector<std::size_t> states, inputs;
  if (state_form(s.op, a, b, states, inputs)) {
    auto k = kalman_test(a, b);
    doc["state_form"] = true;
    doc["rank"] = k.rank;
    doc["states"] = states.size();
    doc["rank_controllable"] = k.rank_controllable;
    doc["duality_controllable"] = k.duality_controllable;
    verdict += "; Kalman rank " + std::to_string(k.rank) + " of " + std::to_string(states.size());
  } else {
    doc["state_form"] = false;
  }
  auto dual = double_duality_test(s.op, [&] {
    auto d = duality(o);
    d.extract_torsion = false;
    return d;
  }());
  doc["duality_controllable"] = dual.torsion_free;
  doc["summary"] = verdict;
  return doc;
}

Document cmd_verify(const RunOptions& o, const SystemDecl& s) {
  std::optional<OperatorMatrix> cand;
  if (o.candidate) {
    if (o.candidate->vars != s.vars) throw PreconditionError("candidate must use the same variables");
    const auto& c = o.candidate->op;
    OperatorMatrix p(s.ctx, c.rows(), c.cols());
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t k = 0; k < c.cols(); ++k) p.at(r, k) = c.at(r, k);
    p.col_labels() = o.candidate->unknowns;
    cand = p;
  } else if (!o.builtin.empty()) {
    cand = builtin_candidate(o.builtin, s.ctx);
  }
  if (!cand) throw PreconditionError("verify-param needs --candidate FILE");
  if (cand->rows() != s.op.cols()) throw PreconditionError("candidate rows must match the unknowns of the system");
  cand->row_labels() = s.unknowns;
  auto rep = verify_parametrization(s.op, *cand, o.inverse_cap, completion(o));
  Document doc;
  bool ok = rep.composes_to_zero && rep.generates_cc;
  doc["summary"] = std::string(ok ? "parametrization verified" : "not a parametrization") +
                   (rep.left_inverse ? "; injective (left inverse found)" : "");
  doc["candidate"] = assignments(*cand);
  doc["composes_to_zero"] = rep.composes_to_zero;
  doc["generates_cc"] = rep.generates_cc;
  if (rep.cc_witness) doc["cc_witness"] = row_doc(*rep.cc_witness, s.op.col_labels());
  doc["left_inverse_searched"] = rep.left_inverse_searched;
  doc["inverse_order_cap"] = rep.inverse_order_cap;
  doc["left_inverse"] = rep.left_inverse ? assignments(*rep.left_inverse) : Document::array();
  return doc;
}

Document cmd_geometry(const RunOptions& o) {
  auto inst = structure_instance(parse_kind(o.kind));
  Document doc;
  doc["kind"] = kind_name(inst.kind);
  Document list = Document::array();
  for (const auto& [label, data] : inst.choices) {
    auto m = medolaghi(inst.kind, data, inst.ctx);
    Document e;
    e["data"] = label;
    e["medolaghi"] = equations(m);
    auto classes = involutivity_classes(JetSystem::from_operator(m), o.seed);
    e["beta"] = classes.beta;
    e["cartan"] = classes.cartan;
    e["cc_count"] = classes.cc_count;
    list.push_back(e);
  }
  doc["summary"] = kind_name(inst.kind) + ": " + std::to_string(list.size()) + " structures";
  doc["structures"] = list;
  return doc;
}

Document cmd_vessiot(const RunOptions& o) {
  auto inst = structure_instance(parse_kind(o.kind));
  Document doc;
  doc["kind"] = kind_name(inst.kind);
  Document list = Document::array();
  std::string sum;
  for (const auto& [label, data] : inst.choices) {
    StructureConstantsRecord rec = inst.kind == StructureKind::Riemann
                                       ? constant_curvature_check(Metric(inst.ctx, data.metric))
                                       : vessiot_constants(inst.kind, data, inst.ctx);
    Document e;
    e["data"] = label;
    e["constant"] = rec.constant;
    Document cs;
    std::string part;
    for (const auto& [k, v] : rec.constants) {
      cs[k] = to_string(v);
      if (inst.kind != StructureKind::Principal) part += (part.empty() ? "" : ", ") + k + " = " + to_string(v);
    }
    e["constants"] = cs;
    if (!rec.constant) e["obstruction"] = rec.obstruction;
    e["jacobi"] = jacobi_check(rec);
    list.push_back(e);
    sum += (sum.empty() ? "" : "; ") + (rec.constant ? (part.empty() ? "constant" : part) : "not constant");
  }
  doc["summary"] = kind_name(inst.kind) + ": " + sum;
  doc["structures"] = list;
  return doc;
}

void render_value(std::ostringstream& os, const Document& v, unsigned indent);

void render_entry(std::ostringstream& os, const std::string& key, const Document& v, unsigned indent) {
  std::string pad(indent, ' ');
  if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const Document& x) { return x.is_number(); })) {
    os << pad << key << ": (";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].dump();
    os << ")\n";
  } else if (v.is_array() || v.is_object()) {
    os << pad << key << ":";
    if (v.empty()) {
      os << " none\n";
      return;
    }
    os << "\n";
    render_value(os, v, indent + 2);
  } else {
    os << pad << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

void render_value(std::ostringstream& os, const Document& v, unsigned indent) {
  std::string pad(indent, ' ');
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) render_entry(os, it.key(), it.value(), indent);
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (x.is_object()) {
        os << pad << "-\n";
        render_value(os, x, indent + 2);
      } else {
        os << pad << (x.is_string() ? x.get<std::string>() : x.dump()) << "\n";
      }
    }
  } else {
    os << pad << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

SystemDecl specialized(const SystemDecl& s, const RunOptions& o) {
  if (o.set.empty()) return s;
  for (const auto& [name, value] : o.set)
    if (!s.ctx->find_param(name)) throw PreconditionError("--set names an undeclared parameter '" + name + "'");
  SystemDecl out = s;
  out.op = specialize(s.op, o.set);
  out.ctx = out.op.context();
  out.params.clear();
  for (const auto& p : s.params)
    if (out.ctx->find_param(p.name)) out.params.push_back(p);
  return out;
}

}  // namespace

std::vector<std::string> command_names() {
  return {"cc", "adjoint", "involutive", "dims", "spencer", "paramtest", "torsion", "kalman", "geometry", "vessiot",
          "verify-param", "show"};
}

bool command_needs_system(const std::string& c) { return c != "geometry" && c != "vessiot"; }

Document run_command(const RunOptions& o, const std::optional<SystemDecl>& decl) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), o.command) == names.end())
    throw PreconditionError("unknown command '" + o.command + "'");
  Document doc;
  doc["schema"] = "1";
  doc["command"] = o.command + (o.kind.empty() ? "" : " " + o.kind);
  doc["seed"] = o.seed;
  Document body;
  if (!command_needs_system(o.command)) {
    body = o.command == "geometry" ? cmd_geometry(o) : cmd_vessiot(o);
  } else {
    if (!decl) throw PreconditionError("command '" + o.command + "' needs a system (file, stdin or --builtin)");
    SystemDecl s = specialized(*decl, o);
    doc["system"] = s.name;
    if (o.command == "cc") body = cmd_cc(o, s);
    else if (o.command == "adjoint") body = cmd_adjoint(o, s);
    else if (o.command == "involutive") body = cmd_involutive(o, s);
    else if (o.command == "dims") body = cmd_dims(o, s);
    else if (o.command == "spencer") body = cmd_spencer(o, s);
    else if (o.command == "paramtest") body = cmd_paramtest(o, s);
    else if (o.command == "torsion") body = cmd_torsion(o, s);
    else if (o.command == "kalman") body = cmd_kalman(o, s);
    else if (o.command == "verify-param") body = cmd_verify(o, s);
    else {
      body["summary"] = "system " + s.name + ": " + std::to_string(s.op.rows()) + " equations";
      body["source"] = render_system(s);
    }
  }
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  return doc;
}

std::string render_text(const Document& doc) {
  std::ostringstream os;
  if (doc.contains("summary")) os << doc["summary"].get<std::string>() << "\n";
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() == "summary" || it.key() == "schema") continue;
    if (it.key() == "source") {
      os << it.value().get<std::string>();
      continue;
    }
    render_entry(os, it.key(), it.value(), 0);
  }
  return os.str();
}

std::string render_json(const Document& doc) { return doc.dump(2) + "\n"; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const PreconditionError*>(&e)) return 2;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  return 1;
}

}  // namespace dmod
