#pragma once
#include <string>

#include <json.hpp>

#include "dentgame/game.hpp"

namespace dentgame {

using json = nlohmann::json;

// Shortest round-trip decimal rendering (used for CSV output).
std::string fmt_double(double v);

json to_json(const Vec& x);
json to_json(const Fun& g);
json to_json(const PolyhedralNorm& N);
json to_json(const Polyhedron& P);
json to_json(const ConeSystem& sys);

Vec vec_from_json(const json& j);
Fun fun_from_json(const json& j);
PolyhedralNorm norm_from_json(const json& j);
Polyhedron polyhedron_from_json(const json& j);

json move_to_json(const MoveRecord& r);
std::string transcript_to_jsonl(const Transcript& tr);
std::string transcript_to_csv(const Transcript& tr, const PolyhedralNorm& N);
json transcript_summary(const Transcript& tr, const Diagnostics& diag);

// CSV dump of every materialized slice of a store:
// band,level,rank_path,f_slice...,c_slice,diam,M,r_budget,vertex_list
std::string partition_to_csv(const PartitionStore& store);

}  // namespace dentgame
