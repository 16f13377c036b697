#include "support.hpp"

#include "discfactor/io.hpp"

#include "doctest.h"

#include <cstdio>
#include <filesystem>

using namespace discfactor;
using namespace testsupport;

namespace {
Settings small_settings() {
    Settings st;
    st.order = 96;
    st.grid = 1024;
    st.residual_boundary = 128;
    st.residual_interior = 32;
    return st;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("discfactor_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};
}  // namespace

TEST_CASE("residual_report: identity with zero factors, shear fixture") {
    Report r0 = residual_report(MatFun::identity(), MatFun::zero(),
                                MatFun::zero(), 64, 16, 1);
    CHECK(r0.residual_sup <= 1e-15);
    CHECK(r0.residual_grid.size() == 80);
    double grid_max = 0.0;
    for (const auto& [z, v] : r0.residual_grid) grid_max = std::max(grid_max, v);
    CHECK(r0.residual_sup == grid_max);

    MatFun sh{DiscFunction(1.0), monomial(1), DiscFunction(0.0),
              DiscFunction(1.0)};
    MatFun log_sh{DiscFunction(0.0), monomial(1), DiscFunction(0.0),
                  DiscFunction(0.0)};
    Report r1 = residual_report(sh, log_sh, MatFun::zero(), 64, 16, 1);
    CHECK(r1.residual_sup <= 1e-12);
    CHECK(r1.traceless_defect == 0.0);
    CHECK(r1.det_defect <= 1e-15);
}

TEST_CASE("residual_report is deterministic for a fixed seed") {
    std::mt19937_64 rng(55);
    MatFun a = random_shear_product(rng, 3, 3, 0.5);
    Settings st = small_settings();
    Factorization f = factor_sl2(a, st);
    Report r1 = residual_report(a, f.m1, f.m2, 64, 32, 9);
    Report r2 = residual_report(a, f.m1, f.m2, 64, 32, 9);
    CHECK(r1.residual_sup == r2.residual_sup);
    REQUIRE(r1.residual_grid.size() == r2.residual_grid.size());
    for (std::size_t k = 0; k < r1.residual_grid.size(); ++k)
        CHECK(r1.residual_grid[k].second == r2.residual_grid[k].second);
}

TEST_CASE("certify_unit: shifted unit, monomial, dominant root") {
    Certificate c1 = certify_unit(
        DiscFunction(std::vector<Complex>{Complex(2.0), Complex(1.0)}), 1024);
    CHECK(c1.winding == 0);
    CHECK(c1.min_boundary_modulus == doctest::Approx(1.0));
    CHECK(c1.unit(1e-8));

    Certificate c2 = certify_unit(monomial(1), 1024);
    CHECK_FALSE(c2.unit(1e-8));
    CHECK(c2.winding == 1);

    Settings st = small_settings();
    DiscFunction t(std::vector<Complex>{Complex(3.0), Complex(0.5)});
    DominantRoot root = dominant_root(t, st);
    Certificate c3 = certify_unit(root.lambda, 1024);
    CHECK(c3.unit(1e-8));
    CHECK(c3.min_boundary_modulus > 1.0);
}

TEST_CASE("traceless_check: rotation generator, identity, pipeline output") {
    MatFun rot{DiscFunction(0.0), DiscFunction(1.0), DiscFunction(-1.0),
               DiscFunction(0.0)};
    CHECK(traceless_check(rot) == 0.0);
    CHECK(traceless_check(MatFun::identity()) == 2.0);

    std::mt19937_64 rng(56);
    MatFun a = random_shear_product(rng, 3, 3, 0.5);
    Settings st = small_settings();
    Factorization f = factor_sl2(a, st);
    CHECK(traceless_check(f.m1) <= 1e-11);
    CHECK(traceless_check(f.m2) <= 1e-11);
}

TEST_CASE("matrix files: write/read round trip is bit-identical") {
    TempDir tmp;
    std::mt19937_64 rng(57);
    MatrixFile mf;
    mf.kind = MatrixKind::sl2;
    mf.trunc_order = 16;
    mf.matrix = random_shear_product(rng, 3, 3, 0.5);
    write_matrix_file(tmp.file("m.json"), mf);
    MatrixFile back = read_matrix_file(tmp.file("m.json"));
    CHECK(back.kind == MatrixKind::sl2);
    for (const auto& pair :
         {std::pair{&mf.matrix.a, &back.matrix.a},
          std::pair{&mf.matrix.b, &back.matrix.b},
          std::pair{&mf.matrix.c, &back.matrix.c},
          std::pair{&mf.matrix.d, &back.matrix.d}}) {
        REQUIRE(pair.first->order() == pair.second->order());
        for (std::size_t k = 0; k < pair.first->order(); ++k)
            CHECK(pair.first->coeffs[k] == pair.second->coeffs[k]);
    }
}

TEST_CASE("matrix files: schema violations are parse errors") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("bad.json"));
        out << R"({"format_version":"1","kind":"sl2","trunc_order":4,)"
            << R"("entries":{"a":[[1,0]],"b":[[0,0]],"c":[[0,0]]}})";
    }
    CHECK_THROWS_AS(read_matrix_file(tmp.file("bad.json")), ParseError);

    {
        std::ofstream out(tmp.file("badkind.json"));
        out << R"({"format_version":"1","kind":"so3","trunc_order":4,)"
            << R"("entries":{"a":[[1,0]],"b":[[0,0]],"c":[[0,0]],"d":[[1,0]]}})";
    }
    CHECK_THROWS_AS(read_matrix_file(tmp.file("badkind.json")), ParseError);

    {
        std::ofstream out(tmp.file("nan.json"));
        out << R"({"format_version":"1","kind":"sl2","trunc_order":4,)"
            << R"("entries":{"a":[[1,0]],"b":[[0,0]],"c":[[0,0]],"d":[[1,)"
            << R"(1e999]]}})";
    }
    CHECK_THROWS_AS(read_matrix_file(tmp.file("nan.json")), ParseError);

    CHECK_THROWS_AS(read_matrix_file(tmp.file("missing.json")), ParseError);
}

TEST_CASE("factors file carries metadata and round-trips") {
    TempDir tmp;
    std::mt19937_64 rng(58);
    Settings st = small_settings();
    MatrixFile mf;
    mf.trunc_order = 8;
    mf.matrix = random_shear_product(rng, 3, 3, 0.5);
    Factorization f = factor_sl2(mf.matrix, st);
    write_factors_file(tmp.file("f.json"), mf, f);
    FactorsFile ff = read_factors_file(tmp.file("f.json"));
    CHECK(ff.branch == branch_name(f.branch));
    CHECK(ff.factor_count == f.factor_count);
    CHECK(ff.residual == f.residual);
    REQUIRE(ff.m1.a.order() == f.m1.a.order());
    for (std::size_t k = 0; k < ff.m1.a.order(); ++k)
        CHECK(ff.m1.a.coeffs[k] == f.m1.a.coeffs[k]);

    // a matrix file is not a factors file
    write_matrix_file(tmp.file("m.json"), mf);
    CHECK_THROWS_AS(read_factors_file(tmp.file("m.json")), ParseError);
}

TEST_CASE("shear-product fixture files have tiny det defect") {
    std::mt19937_64 rng(59);
    MatFun a = random_shear_product(rng, 4, 3, 0.6);
    CHECK(det_defect(a, 1024) <= 1e-12);
}

TEST_CASE("report and CSV writers produce the declared layout") {
    TempDir tmp;
    Report rep;
    rep.residual_sup = 1.5e-9;
    rep.residual_grid = {{Complex(1.0, 0.0), 1.5e-9},
                         {Complex(0.0, 0.5), 0.5e-9}};
    rep.branch = "generic";
    rep.timings["factor"] = 0.25;
    write_report_file(tmp.file("r.json"), rep);
    write_residual_csv(tmp.file("r.csv"), rep);

    std::ifstream csv(tmp.file("r.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "re,im,residual");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);

    auto j = io_detail::load(tmp.file("r.json"));
    CHECK(j["branch"] == "generic");
    CHECK(j["residual_sup"].get<double>() == 1.5e-9);
}
