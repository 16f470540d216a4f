#include "falforge/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace falforge {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON document");
    return j;
}

json circle_json(const GeneralizedCircle& C) {
    return json{{"a", C.a},
                {"b_im", std::imag(C.b)},
                {"b_re", std::real(C.b)},
                {"c", C.c},
                {"orientation", C.orientation}};
}

json point_json(const Point& p) {
    if (p.infinite) return json{{"infinite", true}};
    return json{{"im", std::imag(p.z)}, {"re", std::real(p.z)}};
}

} // namespace

NerveFile parse_nerve_json(const std::string& text) {
    json j = parse(text);
    if (!j.is_object()) throw ParseError("nerve document must be an object");
    if (!j.contains("vertices") || !j["vertices"].is_number_integer()) {
        throw ParseError("missing integer field 'vertices'");
    }
    if (!j.contains("faces") || !j["faces"].is_array()) {
        throw ParseError("missing array field 'faces'");
    }
    NerveFile out;
    out.nerve.vertex_count = j["vertices"].get<int>();
    for (const auto& face : j["faces"]) {
        if (!face.is_array() || face.size() != 3 || !face[0].is_number_integer() ||
            !face[1].is_number_integer() || !face[2].is_number_integer()) {
            throw ParseError("each face must be a triple of vertex indices");
        }
        out.nerve.faces.push_back({face[0].get<int>(), face[1].get<int>(), face[2].get<int>()});
    }
    if (j.contains("dimer")) {
        if (!j["dimer"].is_array()) throw ParseError("'dimer' must be an array of edge indices");
        Dimer D;
        for (const auto& e : j["dimer"]) {
            if (!e.is_number_integer()) throw ParseError("dimer entries must be integers");
            D.edges.push_back(e.get<int>());
        }
        out.dimer = std::move(D);
    }
    return out;
}

NerveFile read_nerve_file(const std::string& path) {
    return parse_nerve_json(read_text_file(path));
}

std::string nerve_to_json(const Nerve& N, const Dimer* D) {
    json j;
    j["vertices"] = N.vertex_count;
    j["faces"] = json::array();
    for (const auto& tri : N.faces) j["faces"].push_back({tri[0], tri[1], tri[2]});
    if (D) j["dimer"] = D->edges;
    return j.dump(2) + "\n";
}

std::string label_to_json(const Nerve& N, const PackingLabel& L, const SolveStats& stats) {
    json j;
    j["geometry"] = to_string(L.geometry);
    j["radii"] = L.radii;
    j["residual"] = {{"angle_sum", angle_sum_residual(N, L)},
                     {"solver", stats.residual},
                     {"sweeps", stats.sweeps}};
    return j.dump(2) + "\n";
}

std::string layout_to_json(const Nerve& N, const Layout& lyt) {
    json j;
    j["geometry"] = to_string(lyt.geometry);
    j["circles"] = json::array();
    for (const auto& C : lyt.vertex_circles) j["circles"].push_back(circle_json(C));
    j["duals"] = json::array();
    for (const auto& C : lyt.face_dual) j["duals"].push_back(circle_json(C));
    j["tangencies"] = json::array();
    for (const auto& p : lyt.edge_tangency) j["tangencies"].push_back(point_json(p));
    j["residual"] = {{"dual_orthogonality", dual_orthogonality_residual(N, lyt)},
                     {"holonomy_closure", lyt.holonomy.max_vertex_closure},
                     {"tangency", tangency_residual(N, lyt)},
                     {"tree_mismatch", lyt.holonomy.max_tree_mismatch}};
    json transitions = json::array();
    for (const auto& [edge, mag] : lyt.holonomy.nontrivial_transitions) {
        transitions.push_back({{"edge", edge}, {"magnitude", mag}});
    }
    j["side_pairings"] = transitions;
    return j.dump(2) + "\n";
}

std::string scoop_to_json(const ScoopComplex& S, const FiniteVolumeReport& rep) {
    json j;
    j["counts"] = {{"black", S.black_count},
                   {"black_pairs", rep.black_pairs},
                   {"ideal_vertices", S.ideal_count},
                   {"white", S.white_count}};
    j["white_faces"] = json::array();
    for (size_t v = 0; v < S.white_edges.size(); ++v) {
        json pts = json::array();
        for (const auto& p : S.white_points[v]) pts.push_back(point_json(p));
        j["white_faces"].push_back(
            {{"edges", S.white_edges[v]}, {"points", pts}, {"vertex", static_cast<int>(v)}});
    }
    j["black_faces"] = json::array();
    for (size_t f = 0; f < S.black_edges.size(); ++f) {
        j["black_faces"].push_back({{"edges", S.black_edges[f]},
                                    {"face", static_cast<int>(f)},
                                    {"paired_with", S.black_pair[f]}});
    }
    j["ideal_vertices"] = json::array();
    for (int e = 0; e < S.ideal_count; ++e) {
        const IdealVertexCell& cell = S.ideal_vertices[e];
        const RectangleShape& R = rep.rectangles[e];
        j["ideal_vertices"].push_back({{"black_faces", {cell.black_faces[0], cell.black_faces[1]}},
                                       {"edge", cell.edge},
                                       {"rectangle", {{"b", R.b}, {"modulus", R.modulus}, {"w", R.w}}},
                                       {"tangency", point_json(cell.tangency)},
                                       {"white_vertices",
                                        {cell.white_vertices[0], cell.white_vertices[1]}}});
    }
    j["horoballs"] = {{"diameters", rep.horoball_diameters}, {"scale", rep.horoball_scale}};
    j["residual"] = {{"closure", S.max_closure},
                     {"orthogonality", S.max_orthogonality_residual},
                     {"white_tangency", S.max_white_tangency_residual}};
    return j.dump(2) + "\n";
}

std::string fal_to_json(const FALDiagram& F, const ComponentPartition& P,
                        const std::vector<CuspShape>& cusps) {
    json j;
    j["genus"] = F.genus;
    j["ambient_double_could_be_s3"] = (F.genus == 0);
    j["crossing_circles"] = json::array();
    for (size_t c = 0; c < F.circles.size(); ++c) {
        const CrossingCircle& C = F.circles[c];
        json entry = {{"edge", C.dual_arc},
                      {"half_twist", C.half_twist},
                      {"id", static_cast<int>(c)},
                      {"nodes", {C.nodes[0], C.nodes[1]}},
                      {"twist_sign", C.twist_sign}};
        if (c < cusps.size()) {
            entry["cusp"] = {{"b", cusps[c].b}, {"w", cusps[c].w}};
        }
        j["crossing_circles"].push_back(entry);
    }
    j["strand_arcs"] = json::array();
    for (size_t s = 0; s < F.strands.size(); ++s) {
        const StrandArc& a = F.strands[s];
        j["strand_arcs"].push_back(
            {{"edge", a.dual_arc},
             {"ends",
              {{{"circle", a.ends[0].circle}, {"side", a.ends[0].side}, {"slot", a.ends[0].slot}},
               {{"circle", a.ends[1].circle}, {"side", a.ends[1].side}, {"slot", a.ends[1].slot}}}},
             {"id", static_cast<int>(s)},
             {"nodes", {a.nodes[0], a.nodes[1]}}});
    }
    j["components"] = P.components;
    j["counts"] = {{"components", P.count()},
                   {"crossing_circles", static_cast<int>(F.circles.size())},
                   {"cusps", P.count() + static_cast<int>(F.circles.size())},
                   {"strand_arcs", static_cast<int>(F.strands.size())}};
    return j.dump(2) + "\n";
}

std::string plan_to_json(const SlopePlan& plan, const Certificate& cert) {
    json j;
    j["inputs"] = {{"delta", plan.delta}, {"epsilon", plan.epsilon}, {"r", plan.bigR}};
    j["threshold"] = plan.threshold;
    j["per_circle_share"] = plan.per_circle_share;
    j["circles"] = json::array();
    for (const CircleFilling& f : plan.circles) {
        j["circles"].push_back({{"b", f.b},
                                {"c", f.c},
                                {"circle", f.circle},
                                {"half_twist", f.half_twist},
                                {"n", f.n},
                                {"normalized_length", f.normalized},
                                {"w", f.w}});
    }
    j["aggregate_length"] = plan.aggregate;
    j["certificate"] = {{"composite_bilipschitz", cert.composite},
                        {"deficient", cert.deficient},
                        {"first_factor", cert.first_factor},
                        {"verdict", cert.pass ? "pass" : "fail"}};
    return j.dump(2) + "\n";
}

FALFile parse_fal_json(const std::string& text) {
    json j = parse(text);
    if (!j.is_object() || !j.contains("crossing_circles") || !j["crossing_circles"].is_array()) {
        throw ParseError("FAL document must contain a 'crossing_circles' array");
    }
    FALFile out;
    out.genus = j.value("genus", 0);
    if (j.contains("counts") && j["counts"].is_object()) {
        out.strand_count = j["counts"].value("strand_arcs", 0);
        out.component_count = j["counts"].value("components", 0);
    }
    for (const auto& c : j["crossing_circles"]) {
        if (!c.is_object() || !c.contains("cusp") || !c["cusp"].is_object()) {
            throw ParseError("crossing circle is missing its cusp rectangle");
        }
        CuspShape shape;
        shape.w = c["cusp"].value("w", 0.0);
        shape.b = c["cusp"].value("b", 0.0);
        shape.half_twist = c.value("half_twist", false);
        if (!(shape.w > 0.0) || !(shape.b > 0.0)) {
            throw ParseError("cusp rectangle sides must be positive");
        }
        out.cusps.push_back(shape);
    }
    return out;
}

FALFile read_fal_file(const std::string& path) { return parse_fal_json(read_text_file(path)); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

} // namespace falforge
