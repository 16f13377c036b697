// Command-line driver: `discfactor factor` runs the exponential
// factorization pipeline on a matrix-of-polynomials file and writes the
// factors plus a certification report; `discfactor verify` independently
// recomputes the residual of a (input, factors) pair and can emit a
// plot-ready CSV.
//
// Exit codes: 0 success; 2 parse/validation; 3 precondition failures
// (non-unit, not null-homotopic, degenerate eigenvalues); 4 stable-rank
// reduction exhausted; 5 residual above tolerance.

#include "discfactor/io.hpp"

#include <chrono>
#include <iostream>

#include "CLI11.hpp"

namespace {

using namespace discfactor;

constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitReduction = 4;
constexpr int kExitResidual = 5;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

struct CommonOpts {
    std::size_t trunc = 256;
    std::size_t grid = 4096;
    double tol = 1e-8;
    double tol_input = 1e-10;
    unsigned seed = 20240817;
    std::size_t boundary_pts = 512;
    std::size_t interior_pts = 128;
};

Settings make_settings(const CommonOpts& o) {
    Settings st;
    st.order = o.trunc;
    st.grid = o.grid;
    st.det_tol = o.tol_input;
    st.seed = o.seed;
    return st;
}

int run_factor(const std::string& input_path, const std::string& output_path,
               const std::string& report_path, const CommonOpts& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    MatrixFile mf = read_matrix_file(input_path);
    const double t_parse = seconds_since(t0);

    Settings st = make_settings(opts);
    st.order = std::max(st.order, mf.trunc_order);

    const auto t1 = std::chrono::steady_clock::now();
    Factorization f = (mf.kind == MatrixKind::sl2) ? factor_sl2(mf.matrix, st)
                                                   : factor_gl2(mf.matrix, st);
    const double t_factor = seconds_since(t1);

    write_factors_file(output_path, mf, f);

    const auto t2 = std::chrono::steady_clock::now();
    Report rep = residual_report(mf.matrix, f.m1, f.m2, opts.boundary_pts,
                                 opts.interior_pts, opts.seed);
    rep.branch = branch_name(f.branch);
    rep.certificates = f.certificates;
    rep.timings["parse"] = t_parse;
    rep.timings["factor"] = t_factor;
    rep.timings["verify"] = seconds_since(t2);
    if (!report_path.empty()) write_report_file(report_path, rep);

    std::cout << "branch: " << branch_name(f.branch)
              << "  factor_count: " << f.factor_count
              << "  residual: " << rep.residual_sup << '\n';
    return 0;
}

int run_verify(const std::string& input_path, const std::string& factors_path,
               const std::string& report_path, const std::string& csv_path,
               const CommonOpts& opts) {
    MatrixFile mf = read_matrix_file(input_path);
    FactorsFile ff = read_factors_file(factors_path);
    if (ff.trunc_order < mf.trunc_order)
        throw ValidationError(
            "verify: factors truncation order " +
            std::to_string(ff.trunc_order) + " is below the input's " +
            std::to_string(mf.trunc_order));

    const auto t0 = std::chrono::steady_clock::now();
    Report rep = residual_report(mf.matrix, ff.m1, ff.m2, opts.boundary_pts,
                                 opts.interior_pts, opts.seed);
    rep.branch = ff.branch;
    rep.timings["verify"] = seconds_since(t0);
    if (!report_path.empty()) write_report_file(report_path, rep);
    if (!csv_path.empty()) write_residual_csv(csv_path, rep);

    std::cout << "residual_sup: " << rep.residual_sup
              << "  traceless_defect: " << rep.traceless_defect
              << "  det_defect: " << rep.det_defect << '\n';
    if (rep.residual_sup > opts.tol) {
        std::cerr << "verify: residual " << rep.residual_sup
                  << " exceeds tolerance " << opts.tol << '\n';
        return kExitResidual;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential factorization of SL2/GL2 matrices over the "
                 "disc algebra"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input_path, output_path = "factors.json", factors_path;
    std::string report_path, csv_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--trunc", opts.trunc, "working truncation order");
        cmd->add_option("--grid", opts.grid, "boundary certification grid");
        cmd->add_option("--seed", opts.seed, "interior sampling seed");
        cmd->add_option("--boundary", opts.boundary_pts,
                        "boundary residual sample count");
        cmd->add_option("--interior", opts.interior_pts,
                        "interior residual sample count");
        cmd->add_option("--report", report_path, "write a JSON report here");
    };

    CLI::App* cmd_factor =
        app.add_subcommand("factor", "factor a matrix into two exponentials");
    cmd_factor->add_option("input", input_path, "input matrix file")
        ->required();
    cmd_factor->add_option("-o,--output", output_path, "factors output file");
    cmd_factor->add_option("--tol-input", opts.tol_input,
                           "sup |det - 1| budget for sl2 inputs");
    add_common(cmd_factor);

    CLI::App* cmd_verify =
        app.add_subcommand("verify", "recompute the residual of a factors file");
    cmd_verify->add_option("input", input_path, "input matrix file")
        ->required();
    cmd_verify->add_option("factors", factors_path, "factors file")->required();
    cmd_verify->add_option("--tol", opts.tol, "residual acceptance threshold");
    cmd_verify->add_option("--csv", csv_path, "write (re, im, residual) CSV");
    add_common(cmd_verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_factor->parsed())
            return run_factor(input_path, output_path, report_path, opts);
        return run_verify(input_path, factors_path, report_path, csv_path,
                          opts);
    } catch (const ParseError& e) {
        std::cerr << "error (parse): " << e.what() << '\n';
        return kExitParse;
    } catch (const ValidationError& e) {
        std::cerr << "error (validation): " << e.what() << '\n';
        return kExitParse;
    } catch (const ReductionFailedError& e) {
        std::cerr << "error (reduction-failed): " << e.what() << '\n';
        return kExitReduction;
    } catch (const NotNullHomotopicError& e) {
        std::cerr << "error (not-null-homotopic): " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const NotAUnitError& e) {
        std::cerr << "error (not-a-unit): " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const NotInvertibleError& e) {
        std::cerr << "error (not-invertible): " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const PreconditionError& e) {
        std::cerr << "error (precondition): " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const UncertifiableError& e) {
        std::cerr << "error (uncertifiable): " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPrecondition;
    }
}
