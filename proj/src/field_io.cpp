#include "jetstokes/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace jetstokes {

static_assert(std::endian::native == std::endian::little, "payload writer assumes a little-endian host");

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kLayout = "n-major, then m, then r";

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

fs::path payload_path_for(const fs::path& header) {
    fs::path p = header;
    p.replace_extension(".bin");
    return p;
}

void write_payload(const fs::path& path, const std::vector<cplx>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("fieldspace", "cannot open payload for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(cplx)));
    if (!out) throw Error("fieldspace", "short write: " + path.string());
}

std::vector<cplx> read_payload(const fs::path& path, size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("fieldspace", "missing payload: " + path.string());
    std::vector<cplx> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(cplx)));
    if (in.gcount() != static_cast<std::streamsize>(count * sizeof(cplx)))
        throw Error("fieldspace", "payload size does not match header: " + path.string());
    return data;
}

json read_header(const fs::path& header) {
    std::ifstream in(header);
    if (!in) throw Error("fieldspace", "missing field header: " + header.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("fieldspace", std::string("malformed header: ") + e.what());
    }
}

}  // namespace

void write_field_file(const fs::path& header, const std::vector<const ScalarField*>& components) {
    if (components.empty()) throw Error("fieldspace", "no components to write");
    ensure_parent(header);
    const auto& dom = components.front()->domain();
    const auto& cfg = dom->config();
    int band = cfg.n_theta;
    bool real = true;
    for (const auto* c : components) {
        band = std::max(band, c->band());
        real = real && c->real_flag();
    }
    std::vector<cplx> data;
    data.reserve(components.size() * (2 * cfg.n_z + 1) * (2 * band + 1) * cfg.n_r);
    for (const auto* c : components)
        for (int n = -cfg.n_z; n <= cfg.n_z; ++n)
            for (int m = -band; m <= band; ++m)
                for (int j = 0; j < cfg.n_r; ++j) data.push_back(c->slice(n)(m, j));

    const fs::path payload = payload_path_for(header);
    json h;
    h["kappa"] = cfg.kappa;
    h["ell"] = cfg.ell;
    h["n_r"] = cfg.n_r;
    h["n_theta"] = band;
    h["n_z"] = cfg.n_z;
    h["components"] = components.size();
    h["dtype"] = "c128";
    h["layout"] = kLayout;
    h["real"] = real;
    h["payload"] = payload.filename().string();
    std::ofstream out(header);
    if (!out) throw Error("fieldspace", "cannot open header for writing: " + header.string());
    out << h.dump(2) << "\n";
    write_payload(payload, data);
}

void write_field_file(const fs::path& header, const ScalarField& f) { write_field_file(header, {&f}); }

void write_field_file(const fs::path& header, const VectorField& v) { write_field_file(header, {&v[0], &v[1], &v[2]}); }

std::vector<ScalarField> read_field_file(const fs::path& header, const DomainPtr& domain) {
    const json h = read_header(header);
    const auto& cfg = domain->config();
    try {
        if (h.at("dtype").get<std::string>() != "c128") throw Error("fieldspace", "unsupported dtype");
        if (h.at("layout").get<std::string>() != kLayout) throw Error("fieldspace", "unsupported layout");
        if (h.at("kappa").get<double>() != cfg.kappa || h.at("ell").get<double>() != cfg.ell ||
            h.at("n_r").get<int>() != cfg.n_r || h.at("n_z").get<int>() != cfg.n_z)
            throw Error("fieldspace", "field file does not match the domain configuration");
        const int band = h.at("n_theta").get<int>();
        const int comps = h.at("components").get<int>();
        if (comps != 1 && comps != 3) throw Error("fieldspace", "components must be 1 or 3");
        const bool real = h.value("real", false);
        const size_t per = static_cast<size_t>(2 * cfg.n_z + 1) * (2 * band + 1) * cfg.n_r;
        const auto data = read_payload(header.parent_path() / h.at("payload").get<std::string>(), per * comps);
        std::vector<ScalarField> out;
        size_t idx = 0;
        for (int c = 0; c < comps; ++c) {
            ScalarField f(domain, -band, band, real);
            for (int n = -cfg.n_z; n <= cfg.n_z; ++n)
                for (int m = -band; m <= band; ++m)
                    for (int j = 0; j < cfg.n_r; ++j) f.slice(n).at(m, j) = data[idx++];
            out.push_back(std::move(f));
        }
        return out;
    } catch (const json::exception& e) {
        throw Error("fieldspace", std::string("malformed header: ") + e.what());
    }
}

void write_matrix_file(const fs::path& header, const Eigen::MatrixXcd& m, const std::string& label) {
    ensure_parent(header);
    std::vector<cplx> data;
    data.reserve(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    const fs::path payload = payload_path_for(header);
    json h;
    h["label"] = label;
    h["rows"] = m.rows();
    h["cols"] = m.cols();
    h["dtype"] = "c128";
    h["layout"] = "row-major";
    h["payload"] = payload.filename().string();
    std::ofstream out(header);
    if (!out) throw Error("stokesop", "cannot open header for writing: " + header.string());
    out << h.dump(2) << "\n";
    write_payload(payload, data);
}

Eigen::MatrixXcd read_matrix_file(const fs::path& header) {
    const json h = read_header(header);
    const auto rows = h.at("rows").get<Eigen::Index>();
    const auto cols = h.at("cols").get<Eigen::Index>();
    const auto data = read_payload(header.parent_path() / h.at("payload").get<std::string>(), static_cast<size_t>(rows * cols));
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[static_cast<size_t>(i * cols + j)];
    return m;
}

}  // namespace jetstokes
