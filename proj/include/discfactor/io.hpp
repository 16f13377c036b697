// File formats: the matrix-of-polynomials input schema, the factors file
// (same schema plus a metadata block), the verification report, and the
// plot-ready residual CSV. All structured files are JSON; coefficients are
// serialized as [re, im] pairs and round-trip bit-identically.
#pragma once

#include "discfactor/factor.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace discfactor {

struct ParseError : Error {
    using Error::Error;
};

enum class MatrixKind { sl2, gl2 };

struct MatrixFile {
    std::string format_version = "1";
    MatrixKind kind = MatrixKind::sl2;
    std::size_t trunc_order = 0;
    MatFun matrix;
};

namespace io_detail {

using nlohmann::json;

inline json coeffs_to_json(const DiscFunction& f) {
    json arr = json::array();
    for (const auto& c : f.coeffs) arr.push_back({c.real(), c.imag()});
    return arr;
}

inline DiscFunction coeffs_from_json(const json& arr, const std::string& key) {
    if (!arr.is_array() || arr.empty())
        throw ParseError("entry '" + key + "' must be a non-empty array");
    std::vector<Complex> cs;
    cs.reserve(arr.size());
    for (const auto& pair : arr) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number())
            throw ParseError("entry '" + key +
                             "' must hold [re, im] number pairs");
        const double re = pair[0].get<double>();
        const double im = pair[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw ParseError("entry '" + key + "' holds a non-finite number");
        cs.emplace_back(re, im);
    }
    return DiscFunction(std::move(cs));
}

inline json matfun_to_json(const MatFun& m) {
    return json{{"a", coeffs_to_json(m.a)},
                {"b", coeffs_to_json(m.b)},
                {"c", coeffs_to_json(m.c)},
                {"d", coeffs_to_json(m.d)}};
}

inline MatFun matfun_from_json(const json& j) {
    MatFun m;
    for (const char* key : {"a", "b", "c", "d"})
        if (!j.contains(key))
            throw ParseError(std::string("missing matrix entry '") + key +
                             "'");
    m.a = coeffs_from_json(j.at("a"), "a");
    m.b = coeffs_from_json(j.at("b"), "b");
    m.c = coeffs_from_json(j.at("c"), "c");
    m.d = coeffs_from_json(j.at("d"), "d");
    return m;
}

inline json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

inline void store(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace io_detail

inline MatrixFile read_matrix_file(const std::string& path) {
    using io_detail::json;
    json j = io_detail::load(path);
    MatrixFile mf;
    if (!j.contains("format_version") || !j["format_version"].is_string())
        throw ParseError(path + ": missing string field 'format_version'");
    mf.format_version = j["format_version"].get<std::string>();
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError(path + ": missing string field 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "sl2")
        mf.kind = MatrixKind::sl2;
    else if (kind == "gl2")
        mf.kind = MatrixKind::gl2;
    else
        throw ParseError(path + ": kind must be 'sl2' or 'gl2', got '" +
                         kind + "'");
    if (!j.contains("trunc_order") || !j["trunc_order"].is_number_unsigned())
        throw ParseError(path + ": missing positive integer 'trunc_order'");
    mf.trunc_order = j["trunc_order"].get<std::size_t>();
    if (mf.trunc_order == 0)
        throw ParseError(path + ": trunc_order must be positive");
    if (!j.contains("entries"))
        throw ParseError(path + ": missing 'entries' object");
    mf.matrix = io_detail::matfun_from_json(j["entries"]);
    return mf;
}

inline void write_matrix_file(const std::string& path, const MatrixFile& mf) {
    using io_detail::json;
    json j{{"format_version", mf.format_version},
           {"kind", mf.kind == MatrixKind::sl2 ? "sl2" : "gl2"},
           {"trunc_order", mf.trunc_order},
           {"entries", io_detail::matfun_to_json(mf.matrix)}};
    io_detail::store(path, j);
}

inline io_detail::json certificate_to_json(const Certificate& c) {
    return io_detail::json{{"winding", c.winding},
                           {"min_boundary_modulus", c.min_boundary_modulus},
                           {"max_boundary_modulus", c.max_boundary_modulus},
                           {"grid_size", c.grid_size}};
}

inline void write_factors_file(const std::string& path, const MatrixFile& input,
                               const Factorization& f) {
    using io_detail::json;
    json certs = json::array();
    for (const auto& c : f.certificates) certs.push_back(certificate_to_json(c));
    json j{{"format_version", input.format_version},
           {"kind", "factors"},
           {"trunc_order",
            std::max({input.trunc_order, f.m1.a.order(), f.m2.a.order()})},
           {"m1", io_detail::matfun_to_json(f.m1)},
           {"m2", io_detail::matfun_to_json(f.m2)},
           {"metadata",
            json{{"branch", branch_name(f.branch)},
                 {"factor_count", f.factor_count},
                 {"residual", f.residual},
                 {"certificates", certs}}}};
    io_detail::store(path, j);
}

struct FactorsFile {
    std::size_t trunc_order = 0;
    MatFun m1, m2;
    std::string branch;
    int factor_count = 0;
    double residual = 0.0;
};

inline FactorsFile read_factors_file(const std::string& path) {
    using io_detail::json;
    json j = io_detail::load(path);
    FactorsFile ff;
    if (!j.contains("kind") || j["kind"] != "factors")
        throw ParseError(path + ": not a factors file");
    if (!j.contains("trunc_order") || !j["trunc_order"].is_number_unsigned())
        throw ParseError(path + ": missing 'trunc_order'");
    ff.trunc_order = j["trunc_order"].get<std::size_t>();
    if (!j.contains("m1") || !j.contains("m2"))
        throw ParseError(path + ": missing factor matrices 'm1'/'m2'");
    ff.m1 = io_detail::matfun_from_json(j["m1"]);
    ff.m2 = io_detail::matfun_from_json(j["m2"]);
    if (j.contains("metadata")) {
        const auto& md = j["metadata"];
        if (md.contains("branch")) ff.branch = md["branch"].get<std::string>();
        if (md.contains("factor_count"))
            ff.factor_count = md["factor_count"].get<int>();
        if (md.contains("residual"))
            ff.residual = md["residual"].get<double>();
    }
    return ff;
}

inline void write_report_file(const std::string& path, const Report& rep) {
    using io_detail::json;
    json certs = json::array();
    for (const auto& c : rep.certificates) certs.push_back(certificate_to_json(c));
    json timings = json::object();
    for (const auto& [k, v] : rep.timings) timings[k] = v;
    json j{{"residual_sup", rep.residual_sup},
           {"traceless_defect", rep.traceless_defect},
           {"det_defect", rep.det_defect},
           {"branch", rep.branch},
           {"samples", rep.residual_grid.size()},
           {"certificates", certs},
           {"timings", timings}};
    io_detail::store(path, j);
}

inline void write_residual_csv(const std::string& path, const Report& rep) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "re,im,residual\n";
    out.precision(17);
    for (const auto& [z, r] : rep.residual_grid)
        out << z.real() << ',' << z.imag() << ',' << r << '\n';
}

}  // namespace discfactor
