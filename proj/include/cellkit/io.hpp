#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cellkit/alexander.hpp"
#include "cellkit/complex.hpp"
#include "cellkit/molecule.hpp"
#include "cellkit/weaving.hpp"

namespace cellkit {

using json = nlohmann::json;

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IOError", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IOError", "cannot write " + path);
    out << text;
    if (!out) fail("IOError", "short write to " + path);
}

inline json parse_json(const std::string& text, const std::string& what = "input")
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail("ParseError", what + ": " + e.what());
    }
}

// FNV-1a, printed as 16 hex digits.
inline std::string digest(const std::string& bytes)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

// -- complexes -----------------------------------------------------------

// Every cell is written, cubes with their chart as vertex list, together with
// face indices into the cell array so weakly simplicial complexes survive.
inline json complex_to_json(const Complex& K)
{
    json j;
    j["dimension"] = K.dimension();
    j["mode"] = to_string(K.mode());
    json vs = json::array();
    for (int v : K.vertex_ids()) {
        json x{{"id", v}};
        if (K.has_coords(v)) x["coords"] = K.coords(v);
        vs.push_back(std::move(x));
    }
    j["vertices"] = std::move(vs);
    json cs = json::array();
    for (const Cell& c : K.cells()) {
        json x{{"dim", c.dim}, {"kind", to_string(c.kind)}};
        x["vertices"] = c.kind == Kind::cube && !c.chart.empty() ? c.chart : c.verts;
        x["faces"] = c.faces;
        cs.push_back(std::move(x));
    }
    j["cells"] = std::move(cs);
    return j;
}

inline Complex complex_from_json(const json& j, bool strict_validation = true)
{
    try {
        const int n = j.at("dimension").get<int>();
        const std::string mode = j.value("mode", "cubical");
        if (mode != "cubical" && mode != "simplicial") fail("MalformedCell", "unknown mode " + mode);
        Complex K(n, mode == "cubical" ? Mode::cubical : Mode::simplicial);
        for (const auto& v : j.at("vertices"))
            K.add_vertex(v.at("id").get<int>(), v.value("coords", std::vector<double>{}));
        const auto& cells = j.at("cells");
        bool explicit_faces = false;
        for (const auto& c : cells) explicit_faces = explicit_faces || c.contains("faces");
        std::vector<int> id_of;
        for (const auto& c : cells) {
            const int d = c.at("dim").get<int>();
            auto verts = c.at("vertices").get<std::vector<int>>();
            const std::string kind = c.value("kind", K.mode() == Mode::cubical ? "cube" : "simplex");
            if (kind != "cube" && kind != "simplex") fail("MalformedCell", "unknown kind " + kind);
            const bool cube = kind == "cube";
            for (int v : verts)
                if (!K.has_vertex_id(v)) fail("UnknownVertex", "cell references vertex " + std::to_string(v));
            if (explicit_faces && d > 0) {
                std::vector<int> faces;
                for (int f : c.value("faces", std::vector<int>{})) {
                    if (f < 0 || static_cast<std::size_t>(f) >= id_of.size())
                        fail("MissingFace", "face index " + std::to_string(f) + " is not an earlier cell");
                    faces.push_back(id_of[static_cast<std::size_t>(f)]);
                }
                std::vector<int> chart = cube ? verts : std::vector<int>{};
                id_of.push_back(K.add_cell_raw(d, cube ? Kind::cube : Kind::simplex, verts, faces, chart));
            } else if (cube) {
                if (verts.size() != (std::size_t{1} << d)) fail("MalformedCell", "cube vertex count");
                id_of.push_back(K.add_cube(verts));
            } else {
                if (static_cast<int>(verts.size()) != d + 1) fail("MalformedCell", "simplex vertex count");
                id_of.push_back(K.add_simplex(verts));
            }
        }
        validate(K, strict_validation);
        return K;
    } catch (const json::exception& e) {
        fail("ParseError", std::string("complex: ") + e.what());
    }
}

inline Complex load_complex(const std::string& path)
{
    return complex_from_json(parse_json(read_file(path), path));
}

// Labels are keyed by vertex id, parities by the vertex list of the simplex.
inline json labeling_to_json(const AlexanderLabeling& L)
{
    json j = complex_to_json(L.complex);
    json lab = json::object(), par = json::array();
    for (auto [v, l] : L.label) lab[std::to_string(v)] = l;
    for (auto [s, e] : L.parity) par.push_back({{"simplex", s}, {"vertices", L.complex.cell(s).verts}, {"parity", e}});
    j["alexander"] = {{"labels", lab}, {"parity", par}, {"degree", degree(L)}};
    return j;
}

inline std::map<int, int> labels_from_json(const json& j)
{
    std::map<int, int> out;
    if (!j.contains("alexander")) return out;
    try {
        for (auto& [k, v] : j.at("alexander").at("labels").items()) out[std::stoi(k)] = v.get<int>();
    } catch (const std::exception& e) {
        fail("ParseError", std::string("alexander labels: ") + e.what());
    }
    return out;
}

// -- molecules -----------------------------------------------------------

inline MoleculeSpec molecule_from_json(const json& j)
{
    try {
        MoleculeSpec s;
        s.n = j.at("n").get<int>();
        for (const auto& a : j.at("atoms")) {
            AtomSpec A;
            A.rho = a.value("rho", 0);
            for (const auto& c : a.at("cubes")) A.cubes.push_back(c.get<Point>());
            s.atoms.push_back(std::move(A));
        }
        if (j.contains("leading")) {
            const auto& l = j.at("leading");
            s.leading = FaceRef{l.at("cube").get<int>(), l.at("axis").get<int>(), l.at("side").get<int>()};
        }
        return s;
    } catch (const json::exception& e) {
        fail("ParseError", std::string("molecule: ") + e.what());
    }
}

inline json molecule_to_json(const MoleculeSpec& s)
{
    json atoms = json::array();
    for (const auto& a : s.atoms) atoms.push_back({{"rho", a.rho}, {"cubes", a.cubes}});
    json j{{"n", s.n}, {"atoms", atoms}};
    if (s.leading) j["leading"] = {{"cube", s.leading->cube}, {"axis", s.leading->axis}, {"side", s.leading->side}};
    return j;
}

// -- sketches ------------------------------------------------------------

// {"p", "colors", "boundary": complex, "images": [{"simplex": [vertex ids], "i", "j", "face_i", "face_j"}]}
inline SketchSpec sketch_from_json(const json& j)
{
    try {
        SketchSpec S;
        S.p = j.at("p").get<int>();
        S.colors = j.at("colors").get<std::vector<int>>();
        S.boundary = complex_from_json(j.at("boundary"), false);
        const int top = S.boundary.dimension();
        for (const auto& g : j.value("images", json::array())) {
            VertexList vs = g.at("simplex").get<VertexList>();
            std::sort(vs.begin(), vs.end());
            auto id = S.boundary.find(vs, top);
            if (!id) fail("UnknownVertex", "image names a simplex not in the boundary");
            SigmaImage im;
            im.i = g.at("i").get<int>();
            im.j = g.at("j").get<int>();
            im.face_i = g.at("face_i").get<int>();
            im.face_j = g.at("face_j").get<int>();
            im.sign_i = g.value("sign_i", 0);
            im.sign_j = g.value("sign_j", 0);
            S.images[*id] = im;
        }
        return S;
    } catch (const json::exception& e) {
        fail("ParseError", std::string("sketch: ") + e.what());
    }
}

inline json sketch_to_json(const SketchSpec& S)
{
    json images = json::array();
    for (const auto& [s, g] : S.images) {
        json x{{"simplex", S.boundary.cell(s).verts}, {"i", g.i}, {"j", g.j}, {"face_i", g.face_i}, {"face_j", g.face_j}};
        if (g.sign_i) x["sign_i"] = g.sign_i;
        if (g.sign_j) x["sign_j"] = g.sign_j;
        images.push_back(std::move(x));
    }
    return {{"p", S.p}, {"colors", S.colors}, {"boundary", complex_to_json(S.boundary)}, {"images", images}};
}

// -- mesh export ---------------------------------------------------------

// Vertices padded or cut to three coordinates; squares and triangles become
// faces, edges not on any written face become lines.
inline void export_complex_obj(const Complex& K, std::ostream& out)
{
    if (!K.all_coords()) fail("NoCoordinates", "OBJ export needs coordinates");
    std::map<int, int> index;
    for (int v : K.vertex_ids()) {
        auto x = K.coords(v);
        x.resize(3, 0.0);
        out << "v " << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
        index[v] = static_cast<int>(index.size()) + 1;
    }
    std::set<int> covered;
    for (int f : K.cells_of_dim(2)) {
        const Cell& c = K.cell(f);
        out << 'f';
        if (c.kind == Kind::cube && c.chart.size() == 4) {
            for (int k : {0, 1, 3, 2}) out << ' ' << index.at(c.chart[static_cast<std::size_t>(k)]);
        } else {
            for (int v : c.verts) out << ' ' << index.at(v);
        }
        out << '\n';
        for (int e : c.faces) covered.insert(e);
    }
    for (int e : K.cells_of_dim(1))
        if (!covered.count(e)) out << "l " << index.at(K.cell(e).verts[0]) << ' ' << index.at(K.cell(e).verts[1]) << '\n';
}

inline void export_complex_csv(const Complex& K, std::ostream& out)
{
    out << "cell,dim,kind,vertices\n";
    for (std::size_t i = 0; i < K.size(); ++i) {
        const Cell& c = K.cell(static_cast<int>(i));
        out << i << ',' << c.dim << ',' << to_string(c.kind) << ',';
        for (std::size_t k = 0; k < c.verts.size(); ++k) out << (k ? " " : "") << c.verts[k];
        out << '\n';
    }
}

} // namespace cellkit
