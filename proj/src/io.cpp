#include "dentgame/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dentgame {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json to_json(const Vec& x) { return json(x.c); }
json to_json(const Fun& g) { return json(g.a); }

json to_json(const PolyhedralNorm& N) {
  json primal = json::array(), dual = json::array();
  for (const Vec& v : N.primal) primal.push_back(v.c);
  for (const Fun& g : N.dual) dual.push_back(g.a);
  return json{{"primal", primal}, {"dual", dual}};
}

json to_json(const Polyhedron& P) {
  json cons = json::array();
  for (const HalfSpace& h : P.constraints)
    cons.push_back(json{{"g", h.g.a},
                        {"c", h.c},
                        {"sense", h.sense == Sense::AtLeast ? "at_least"
                                                            : "strictly_less"}});
  return json{{"d", P.d}, {"constraints", cons}};
}

json to_json(const ConeSystem& sys) {
  return json{{"d", sys.d},
              {"f", sys.f.a},
              {"epsilon", sys.epsilon},
              {"norm", to_json(sys.N)}};
}

Vec vec_from_json(const json& j) {
  return Vec(j.get<std::vector<double>>());
}

Fun fun_from_json(const json& j) {
  return Fun(j.get<std::vector<double>>());
}

PolyhedralNorm norm_from_json(const json& j) {
  PolyhedralNorm N;
  for (const auto& v : j.at("primal")) N.primal.push_back(vec_from_json(v));
  for (const auto& g : j.at("dual")) N.dual.push_back(fun_from_json(g));
  return N;
}

Polyhedron polyhedron_from_json(const json& j) {
  Polyhedron P(j.at("d").get<int>());
  for (const auto& c : j.at("constraints")) {
    HalfSpace h;
    h.g = fun_from_json(c.at("g"));
    h.c = c.at("c").get<double>();
    h.sense = c.value("sense", "at_least") == std::string("strictly_less")
                  ? Sense::StrictlyLess
                  : Sense::AtLeast;
    P.add(std::move(h));
  }
  return P;
}

json move_to_json(const MoveRecord& r) {
  json j{{"n", r.n}, {"x", r.x.c}, {"p", r.band}, {"rank_path", r.rank_path}};
  if (!r.t.a.empty()) j["t"] = r.t.a;
  if (r.tau) j["tau"] = *r.tau;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::string transcript_to_jsonl(const Transcript& tr) {
  std::ostringstream out;
  for (const MoveRecord& r : tr.moves) out << move_to_json(r).dump() << "\n";
  return out.str();
}

std::string transcript_to_csv(const Transcript& tr, const PolyhedralNorm& N) {
  std::ostringstream out;
  int d = tr.moves.empty() ? 0 : tr.moves.front().x.dim();
  out << "n";
  for (int i = 0; i < d; ++i) out << ",x" << i + 1;
  out << ",p,step_norm\n";
  for (size_t i = 0; i < tr.moves.size(); ++i) {
    const MoveRecord& r = tr.moves[i];
    out << r.n;
    for (int k = 0; k < d; ++k) out << "," << fmt_double(r.x[k]);
    double step =
        i + 1 < tr.moves.size() ? norm(tr.moves[i + 1].x - r.x, N) : 0.0;
    out << "," << r.band << "," << fmt_double(step) << "\n";
  }
  return out.str();
}

json transcript_summary(const Transcript& tr, const Diagnostics& diag) {
  json j{{"steps", tr.moves.empty() ? 0 : tr.moves.back().n},
         {"termination", tr.termination},
         {"rank_monotone", diag.rank_monotone},
         {"tail_span", diag.tail_span}};
  if (diag.cauchy_step)
    j["cauchy_step"] = *diag.cauchy_step;
  else
    j["cauchy_step"] = nullptr;
  if (!tr.moves.empty()) j["final_x"] = tr.moves.back().x.c;
  return j;
}

namespace {

void dump_node(std::ostringstream& out, const SliceNode& node,
               const std::string& path) {
  out << node.band << "," << node.level << "," << path << ",";
  for (int i = 0; i < node.f_slice.dim(); ++i) {
    if (i) out << ";";
    out << fmt_double(node.f_slice[i]);
  }
  out << "," << fmt_double(node.c_slice) << "," << fmt_double(node.diam) << ","
      << fmt_double(node.M) << "," << fmt_double(node.r_budget) << ",";
  for (size_t i = 0; i < node.verts.size(); ++i) {
    if (i) out << "|";
    for (int k = 0; k < node.verts[i].dim(); ++k) {
      if (k) out << ";";
      out << fmt_double(node.verts[i][k]);
    }
  }
  out << "\n";
  for (size_t i = 0; i < node.children.size(); ++i)
    dump_node(out, node.children[i], path + "." + std::to_string(i));
}

}  // namespace

std::string partition_to_csv(const PartitionStore& store) {
  std::ostringstream out;
  out << "band,level,rank_path,f_slice,c_slice,diam,M,r_budget,vertex_list\n";
  for (const auto& [p, band] : store.bands())
    for (size_t i = 0; i < band.nodes.size(); ++i)
      dump_node(out, band.nodes[i], std::to_string(i));
  return out.str();
}

}  // namespace dentgame
