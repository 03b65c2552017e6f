#include "dplab/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dplab/errors.hpp"

namespace dplab {

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void put_f64(std::vector<std::uint8_t>& out, double x) {
    const auto v = std::bit_cast<std::uint64_t>(x);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
    if (at + 4 > in.size()) throw Error("truncated binary data");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(in[at + static_cast<std::size_t>(k)]) << (8 * k);
    return v;
}

double get_f64(const std::vector<std::uint8_t>& in, std::size_t at) {
    if (at + 8 > in.size()) throw Error("truncated binary data");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(k)]) << (8 * k);
    return std::bit_cast<double>(v);
}

void check_magic(const std::vector<std::uint8_t>& in, const char* magic) {
    if (in.size() < 4 || std::memcmp(in.data(), magic, 4) != 0) throw Error(std::string("bad magic, expected ") + magic);
}

Json vec(Vec2 v) { return Json::array({v.x, v.y}); }
Vec2 vec_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string fmt(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

Json to_json(const InclusionSet& set) {
    Json j;
    j["model"] = to_string(set.model);
    j["seed"] = set.seed;
    j["dim"] = set.dim;
    j["period"] = set.period;
    j["periodic"] = set.periodic;
    j["saturated"] = set.saturated;
    Json incs = Json::array();
    for (const Inclusion& inc : set.inclusions) {
        Json e;
        e["id"] = inc.id;
        if (const auto* d = std::get_if<Disc>(&inc.shape)) {
            e["type"] = "disc";
            e["center"] = vec(d->center);
            e["radius"] = d->radius;
        } else if (const auto* c = std::get_if<Capsule>(&inc.shape)) {
            e["type"] = "capsule";
            e["a"] = vec(c->a);
            e["b"] = vec(c->b);
            e["width"] = c->width;
        } else {
            const auto& cl = std::get<CellCluster>(inc.shape);
            e["type"] = "cluster";
            e["cell_size"] = cl.cell_size;
            Json cells = Json::array();
            for (const auto& c2 : cl.cells) cells.push_back(Json::array({c2[0], c2[1]}));
            e["cells"] = std::move(cells);
        }
        incs.push_back(std::move(e));
    }
    j["inclusions"] = std::move(incs);
    return j;
}

InclusionSet inclusion_set_from_json(const Json& j) {
    InclusionSet set;
    try {
        set.model = geometry_model_from_string(j.at("model").get<std::string>());
        set.seed = j.at("seed").get<std::uint64_t>();
        set.dim = j.value("dim", 2);
        set.period = j.at("period").get<double>();
        set.periodic = j.value("periodic", true);
        set.saturated = j.value("saturated", false);
        for (const Json& e : j.at("inclusions")) {
            Inclusion inc;
            inc.id = e.value("id", static_cast<int>(set.inclusions.size()));
            const std::string type = e.at("type").get<std::string>();
            if (type == "disc") {
                inc.shape = Disc{vec_from(e.at("center")), e.at("radius").get<double>()};
            } else if (type == "capsule") {
                inc.shape = Capsule{vec_from(e.at("a")), vec_from(e.at("b")), e.at("width").get<double>()};
            } else if (type == "cluster") {
                CellCluster cl;
                cl.cell_size = e.at("cell_size").get<double>();
                for (const Json& c : e.at("cells")) cl.cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
                inc.shape = std::move(cl);
            } else {
                throw GeometryError("unknown inclusion type '" + type + "'");
            }
            set.inclusions.push_back(std::move(inc));
        }
    } catch (const Json::exception& e) {
        throw GeometryError(std::string("malformed geometry JSON: ") + e.what());
    }
    return set;
}

std::vector<std::uint8_t> encode_bitmap(const IndicatorGrid& grid) {
    std::vector<std::uint8_t> out{'D', 'P', 'L', 'B'};
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(grid.dim));
    put_u32(out, static_cast<std::uint32_t>(grid.n));
    put_f64(out, grid.period);
    put_u32(out, grid.periodic ? 1u : 0u);
    put_u32(out, 0u);
    const std::size_t start = out.size();
    out.resize(start + (grid.cells.size() + 7) / 8, 0);
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        if (grid.cells[c]) out[start + c / 8] |= static_cast<std::uint8_t>(1u << (c % 8));
    }
    return out;
}

IndicatorGrid decode_bitmap(const std::vector<std::uint8_t>& bytes) {
    check_magic(bytes, "DPLB");
    if (get_u32(bytes, 4) != kVersion) throw Error("unsupported bitmap version");
    IndicatorGrid g;
    g.dim = static_cast<int>(get_u32(bytes, 8));
    g.n = static_cast<int>(get_u32(bytes, 12));
    g.period = get_f64(bytes, 16);
    g.periodic = (get_u32(bytes, 24) & 1u) != 0;
    if (g.dim < 1 || g.dim > 2 || g.n < 1) throw Error("bad bitmap header");
    const std::size_t cells = static_cast<std::size_t>(g.n) * (g.dim == 2 ? static_cast<std::size_t>(g.n) : 1);
    if (bytes.size() != 32 + (cells + 7) / 8) throw Error("bitmap size does not match its header");
    g.cells.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) g.cells[c] = (bytes[32 + c / 8] >> (c % 8)) & 1u;
    return g;
}

void write_bitmap(const std::filesystem::path& path, const IndicatorGrid& grid) { write_file(path, encode_bitmap(grid)); }
IndicatorGrid read_bitmap(const std::filesystem::path& path) { return decode_bitmap(read_file(path)); }

std::vector<std::uint8_t> encode_grid_function(const GridFunction& u) {
    std::vector<std::uint8_t> out{'D', 'P', 'G', 'F'};
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(u.grid.dim));
    put_u32(out, static_cast<std::uint32_t>(u.grid.n));
    put_f64(out, u.grid.extent);
    const bool masked = !u.mask.empty();
    put_u32(out, (u.grid.periodic ? 1u : 0u) | (masked ? 2u : 0u));
    put_u32(out, static_cast<std::uint32_t>(u.bc));
    put_u32(out, static_cast<std::uint32_t>(u.staggering));
    put_u32(out, static_cast<std::uint32_t>(u.values.size()));
    for (double x : u.values) put_f64(out, x);
    if (masked) out.insert(out.end(), u.mask.begin(), u.mask.end());
    return out;
}

GridFunction decode_grid_function(const std::vector<std::uint8_t>& bytes) {
    check_magic(bytes, "DPGF");
    if (get_u32(bytes, 4) != kVersion) throw Error("unsupported grid function version");
    GridFunction u;
    u.grid.dim = static_cast<int>(get_u32(bytes, 8));
    u.grid.n = static_cast<int>(get_u32(bytes, 12));
    u.grid.extent = get_f64(bytes, 16);
    const std::uint32_t flags = get_u32(bytes, 24);
    u.grid.periodic = (flags & 1u) != 0;
    u.bc = static_cast<BoundaryKind>(get_u32(bytes, 28));
    u.staggering = static_cast<Staggering>(get_u32(bytes, 32));
    const std::size_t count = get_u32(bytes, 36);
    const bool masked = (flags & 2u) != 0;
    if (bytes.size() != 40 + 8 * count + (masked ? count : 0)) throw Error("grid function size does not match its header");
    u.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) u.values[k] = get_f64(bytes, 40 + 8 * k);
    if (masked) u.mask.assign(bytes.begin() + static_cast<std::ptrdiff_t>(40 + 8 * count), bytes.end());
    return u;
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& u) {
    write_file(path, encode_grid_function(u));
}
GridFunction read_grid_function(const std::filesystem::path& path) { return decode_grid_function(read_file(path)); }

std::string grid_function_csv(const GridFunction& u) {
    std::string s = "x,y,value\n";
    const Grid& g = u.grid;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.n; ++i) {
            const Vec2 c = g.center(i, j);
            s += fmt(c.x) + "," + fmt(c.y) + "," + fmt(u.values[g.index(i, j)]) + "\n";
        }
    }
    return s;
}

Json to_json(const Matrix2& m) { return Json::array({Json::array({m[0][0], m[0][1]}), Json::array({m[1][0], m[1][1]})}); }

Json to_json(const HomogenizedData& hd) {
    Json j;
    j["dim"] = hd.dim;
    j["a_bar"] = to_json(hd.a_bar);
    j["mean_v"] = hd.mean_v;
    j["vol_frac"] = hd.vol_frac;
    Json r;
    r["abar_energy_vs_flux"] = hd.abar_detail.disagreement;
    Json phi = Json::array();
    for (double x : hd.phi.residuals) phi.push_back(x);
    r["corrector"] = std::move(phi);
    Json sig = Json::array();
    Json qd = Json::array();
    for (const auto& s : hd.sigma) {
        sig.push_back(s.residual);
        qd.push_back(s.q_mean_defect);
    }
    r["flux_corrector"] = std::move(sig);
    r["flux_mean_defect"] = std::move(qd);
    r["inclusion_corrector"] = hd.theta.residual;
    j["residuals"] = std::move(r);
    return j;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace dplab
