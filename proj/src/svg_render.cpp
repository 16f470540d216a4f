#include "falforge/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace falforge {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.8f", x);
    return buf;
}

struct Box {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    void add(cplx z, double r = 0.0) {
        x0 = std::min(x0, std::real(z) - r);
        y0 = std::min(y0, std::imag(z) - r);
        x1 = std::max(x1, std::real(z) + r);
        y1 = std::max(y1, std::imag(z) + r);
    }
    void pad(double f) {
        double m = f * std::max(x1 - x0, y1 - y0);
        x0 -= m;
        y0 -= m;
        x1 += m;
        y1 += m;
    }
};

// SVG y grows downward; emit with y negated.
void emit_circle(std::ostringstream& os, cplx center, double r, const char* style) {
    os << "  <circle cx=\"" << num(std::real(center)) << "\" cy=\"" << num(-std::imag(center))
       << "\" r=\"" << num(r) << "\" " << style << "/>\n";
}

void emit_line(std::ostringstream& os, cplx a, cplx b, const char* style) {
    os << "  <line x1=\"" << num(std::real(a)) << "\" y1=\"" << num(-std::imag(a)) << "\" x2=\""
       << num(std::real(b)) << "\" y2=\"" << num(-std::imag(b)) << "\" " << style << "/>\n";
}

std::string svg_open(const Box& b) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(b.x0) << " "
       << num(-b.y1) << " " << num(b.x1 - b.x0) << " " << num(b.y1 - b.y0) << "\">\n";
    return os.str();
}

void emit_generalized(std::ostringstream& os, const GeneralizedCircle& C, const Box& box,
                      const char* style) {
    if (!C.is_line()) {
        emit_circle(os, C.center(), C.radius(), style);
        return;
    }
    double span = std::hypot(box.x1 - box.x0, box.y1 - box.y0);
    cplx foot = -0.5 * C.c * C.b;
    cplx dir = cplx{0, 1} * C.b;
    emit_line(os, foot - span * dir, foot + span * dir, style);
}

} // namespace

std::string render_packing_svg(const Nerve& N, const Layout& lyt, bool show_duals) {
    Box box;
    for (const auto& C : lyt.vertex_circles) {
        if (!C.is_line()) box.add(C.center(), C.radius());
    }
    box.pad(0.05);

    std::ostringstream os;
    os << svg_open(box);
    const char* solid = "fill=\"none\" stroke=\"black\" stroke-width=\"0.01\"";
    const char* dashed =
        "fill=\"none\" stroke=\"gray\" stroke-width=\"0.008\" stroke-dasharray=\"0.04 0.02\"";
    for (const auto& C : lyt.vertex_circles) emit_generalized(os, C, box, solid);
    if (show_duals) {
        for (size_t f = 0; f < N.faces.size(); ++f) {
            emit_generalized(os, lyt.face_dual[f], box, dashed);
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_diagram_svg(const Nerve& N, const Layout& lyt, const FALDiagram& F) {
    if (F.circles.empty()) throw ValidationError("render_diagram_svg: empty diagram");
    NerveTopology T = analyze_nerve(N);

    // node positions: dual-circle centers; crossing circles sit at the
    // colored-edge tangency. Everything is drawn in the chart of each edge's
    // first incident face, which keeps the local pictures coherent.
    auto node_pos = [&](int face) -> cplx {
        const GeneralizedCircle& D = lyt.face_dual[face];
        return D.is_line() ? -0.5 * D.c * D.b : D.center();
    };
    Box box;
    for (int f = 0; f < static_cast<int>(N.faces.size()); ++f) box.add(node_pos(f));
    for (const auto& p : lyt.edge_tangency) {
        if (!p.infinite) box.add(p.z);
    }
    box.pad(0.08);

    std::ostringstream os;
    os << svg_open(box);
    const char* strand_style = "fill=\"none\" stroke=\"black\" stroke-width=\"0.012\"";
    const char* circle_style = "fill=\"none\" stroke=\"crimson\" stroke-width=\"0.012\"";
    const char* twist_style = "stroke=\"crimson\" stroke-width=\"0.02\"";

    for (const StrandArc& s : F.strands) {
        int e = s.dual_arc;
        int fa = T.edge_faces[e][0], fb = T.edge_faces[e][1];
        cplx a = node_pos(fa);
        cplx b_raw = node_pos(fb);
        GeneralizedCircle dual_b = mobius_apply(lyt.edge_transition[e], lyt.face_dual[fb]);
        cplx b = dual_b.is_line() ? b_raw : dual_b.center();
        Point t = lyt.edge_tangency[e];
        cplx mid = t.infinite ? 0.5 * (a + b) : t.z;
        os << "  <path d=\"M " << num(std::real(a)) << " " << num(-std::imag(a)) << " Q "
           << num(std::real(mid)) << " " << num(-std::imag(mid)) << " " << num(std::real(b))
           << " " << num(-std::imag(b)) << "\" " << strand_style << "/>\n";
    }
    for (const CrossingCircle& C : F.circles) {
        int e = C.dual_arc;
        Point t = lyt.edge_tangency[e];
        if (t.infinite) continue;
        int fa = T.edge_faces[e][0];
        double r = 0.35 * std::abs(node_pos(fa) - t.z);
        emit_circle(os, t.z, r, circle_style);
        if (C.half_twist) {
            cplx d = std::polar(r, 0.7853981633974483);
            emit_line(os, t.z - d, t.z + d, twist_style);
        }
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace falforge
