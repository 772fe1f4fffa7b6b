// subdyn: command-line front end for the substitution-dynamics library.

#include "cli_support.hpp"

#include "subdyn/algebraic.hpp"
#include "subdyn/bernoulli.hpp"
#include "subdyn/diophantine.hpp"
#include "subdyn/flows.hpp"
#include "subdyn/spectral.hpp"
#include "subdyn/substitution.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <random>
#include <thread>

using namespace subdyn;
using namespace subdyn::cli;

namespace {

struct Global {
    std::string config;
    std::string out = "out";
    int threads = 1;
    long precision_bits = 256;
    std::uint64_t seed = 0;
    bool diagnostic = false;
};

Config need_config(const Global& g) {
    if (g.config.empty()) fail(ErrorKind::ConfigError, "--config is required for this command");
    return load_config(g.config);
}

Run start_run(const Global& g, const std::string& command, const Config* c) {
    Run r;
    r.command = command;
    r.out_dir = g.out;
    if (c) {
        r.config_text = c->text;
        r.config_path = c->path;
    }
    r.precision["precision_bits"] = g.precision_bits;
    r.params["threads"] = g.threads;
    r.params["seed"] = g.seed;
    r.params["diagnostic"] = g.diagnostic;
    return r;
}

template <class F>
void parallel_for(size_t n, int threads, F&& f) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<size_t>(n, 1))));
    if (threads == 1) {
        for (size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (size_t i = static_cast<size_t>(t); i < n; i += static_cast<size_t>(threads)) f(i);
        });
    for (auto& th : pool) th.join();
}

std::string word_str(const Word& w) {
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i && w.size() > 0 && std::any_of(w.begin(), w.end(), [](Letter c) { return c >= 9; })) s += ',';
        s += std::to_string(w[i] + 1);
    }
    return s;
}

json matrix_json(const BigMatrix& S) {
    json m = json::array();
    for (int i = 0; i < S.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < S.cols(); ++j) row.push_back(S(i, j).get_str());
        m.push_back(row);
    }
    return m;
}

std::string interval_str(const Interval& x, int digits = 20) {
    std::ostringstream o;
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", digits, x.mid().get());
    o << s;
    mpfr_free_str(s);
    return o.str();
}

Profile parse_profile(const std::string& s, int m) {
    auto v = parse_double_list(s);
    if (static_cast<int>(v.size()) != m) fail(ErrorKind::ConfigError, "profile needs one constant per letter");
    return Profile::constant(v);
}

Letter parse_letter(int a, int m) {
    if (a < 1 || a > m) fail(ErrorKind::ConfigError, "letter must lie in 1.." + std::to_string(m));
    return static_cast<Letter>(a - 1);
}

std::vector<Frequency> parse_omegas(const std::string& list, const std::string& grid, long prec) {
    std::vector<Frequency> out;
    if (!list.empty()) {
        std::stringstream ss(list);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(Frequency::parse(tok, prec));
    } else {
        for (const auto& q : parse_grid(grid)) out.push_back(Frequency::from_real(Mp(prec, q)));
    }
    return out;
}

// ---------------------------------------------------------------- inspect

int cmd_inspect(const Global& g) {
    Config c = need_config(g);
    Run run = start_run(g, "inspect", &c);
    Substitution z = config_substitution(c);
    BigMatrix S = substitution_matrix(z);
    json rep = json::object();
    rep["alphabet"] = z.size();
    json imgs = json::array();
    for (int a = 0; a < z.size(); ++a) imgs.push_back(word_str(z.image(static_cast<Letter>(a))));
    rep["images"] = imgs;
    rep["matrix"] = matrix_json(S);
    Primitivity pr = is_primitive(S);
    rep["primitive"] = pr.primitive;
    rep["primitivity_exponent"] = pr.exponent;
    std::ostream& o = std::cout;
    o << "alphabet: " << z.size() << "\nmatrix:";
    for (int i = 0; i < S.rows(); ++i) {
        o << (i ? "\n        " : " ") << "[";
        for (int j = 0; j < S.cols(); ++j) o << (j ? ", " : "") << S(i, j).get_str();
        o << "]";
    }
    o << "\nprimitive: " << (pr.primitive ? "yes (exponent " + std::to_string(pr.exponent) + ")" : "no") << "\n";
    if (pr.primitive) {
        PerronData pd = perron_data(S, g.precision_bits);
        rep["charpoly"] = pd.charpoly.str();
        rep["theta"] = interval_str(pd.theta);
        rep["theta_width"] = pd.theta.width().to_double();
        json freq = json::array();
        for (double x : pd.r_d) freq.push_back(x);
        rep["frequencies"] = freq;
        IntPoly mp = largest_root_minimal_polynomial(pd.charpoly);
        AlgebraicInteger a = AlgebraicInteger::from_poly(mp);
        Classification cl = classify(a);
        rep["minimal_polynomial"] = mp.str();
        rep["classification"] = class_name(cl.cls);
        ReturnWord rw = find_return_word(z);
        rep["return_word"] = {{"v", word_str(rw.v)}, {"c", rw.c + 1}, {"power", rw.power}};
        AperiodicityVerdict av = is_aperiodic_heuristic(z);
        const char* verdict = av.verdict == Periodicity::Aperiodic         ? "Aperiodic"
                              : av.verdict == Periodicity::PeriodicWitness ? "PeriodicWitness"
                                                                           : "Unknown";
        rep["aperiodicity"] = verdict;
        if (av.period) rep["period"] = av.period;
        FixedPoint fp(z);
        rep["fixed_point"] = {{"letter", fp.letter() + 1}, {"power", fp.power()}};
        o << "charpoly: " << pd.charpoly.str() << "\ntheta: " << interval_str(pd.theta)
          << "\nminimal polynomial: " << mp.str() << "\nclass: " << class_name(cl.cls)
          << "\nreturn word: " << word_str(rw.v) << " (c = " << rw.c + 1 << ", power " << rw.power << ")"
          << "\naperiodicity: " << verdict << "\n";
    }
    run.write("inspect.json", rep.dump(2) + "\n");
    run.finish("ok");
    return kOk;
}

// ---------------------------------------------------------------- spectral

struct SpectralOpts {
    std::string omega, grid = "0:1:100";
    int n = 12;
    int letter = 1;
    long fejer_N = 1024;
    int samples = 16;
};

int cmd_spectral(const Global& g, const SpectralOpts& so) {
    Config c = need_config(g);
    Run run = start_run(g, "spectral", &c);
    Substitution z = config_substitution(c);
    Letter a = parse_letter(so.letter, z.size());
    if (so.n < 0) fail(ErrorKind::ConfigError, "--n must be >= 0");
    if (so.fejer_N < 1) fail(ErrorKind::ConfigError, "--fejer-N must be >= 1");
    auto omegas = parse_omegas(so.omega, so.grid, g.precision_bits);
    run.params["omega"] = so.omega;
    run.params["omega_grid"] = so.omega.empty() ? so.grid : "";
    run.params["n"] = so.n;
    run.params["letter"] = so.letter;
    run.params["fejer_N"] = so.fejer_N;
    run.params["samples"] = so.samples;
    DiophConstants k = dioph_constants(z);
    run.constants["c1"] = k.c1;
    run.constants["c1_uniform"] = k.c1_uniform;
    run.constants["Cprime"] = k.Cprime;
    run.constants["theta"] = k.theta;
    run.constants["return_word"] = word_str(k.v);
    run.constants["power"] = k.power;
    std::vector<std::complex<double>> d(static_cast<size_t>(z.size()), 0.0);
    d[a] = 1.0;
    struct Row {
        std::string status = "ok";
        std::optional<ErrorKind> err;
        ProductBound pb;
        SpectralBound sb;
        LocalDimension ld;
    };
    std::vector<Row> rows(omegas.size());
    int ld_n = std::max(so.n, 10);
    parallel_for(omegas.size(), g.threads, [&](size_t i) {
        Row& r = rows[i];
        try {
            r.pb = dioph_product_bound(k, a, omegas[i], so.n / std::max(1, k.power));
            r.sb = spectral_ball_bound(z, d, omegas[i], 1.0 / (2.0 * static_cast<double>(so.fejer_N)), so.samples);
            r.ld = local_dimension_bound(z, omegas[i], ld_n);
        } catch (const Error& e) {
            r.status = kind_name(e.kind());
            r.err = e.kind();
        }
    });
    Csv csv({"omega", "status", "product_bound", "product", "product_levels", "fejer_N", "G", "fejer_bound",
             "fejer_vacuous", "local_alpha", "local_dimension_bound"});
    std::optional<ErrorKind> first;
    for (size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        if (r.err) {
            if (!first) first = r.err;
            csv.row(omegas[i].to_double(), r.status, "", "", "", "", "", "", "", "", "");
            continue;
        }
        csv.row(omegas[i].to_double(), r.status, r.pb.bound, r.pb.product, r.pb.factors, r.sb.N, r.sb.G, r.sb.upper,
                r.sb.vacuous, r.ld.alpha, r.ld.bound);
    }
    run.write("spectral.csv", csv.str());
    if (first) {
        run.finish(kind_name(*first));
        std::cerr << "error: " << kind_name(*first) << " on some rows (flagged in spectral.csv)\n";
        return exit_code(*first);
    }
    run.finish("ok");
    return kOk;
}

// ---------------------------------------------------------------- flow

struct FlowOpts {
    // log-holder
    double B = 2.0;
    std::string omega = "1,sqrt(2)";
    std::string r_grid = "1e-2,1e-4,1e-8,1e-16";
    int letter = 1;
    int samples = 16;
    // cocycle / decomposition
    std::string t = "0,1,10,100,1000";
    int anchors = 8;
    double span = 1000.0;
    int k = -1;
    int k_lo = 5, k_hi = 12;
    double anchor = 618.0339887498949;
    // zero-scaling
    int N_lo = 4, N_hi = 9, windows = 32;
    double amplitude = 1.0;
    std::string profile;
};

void eigen_constants(Run& run, const Cocycle& c) {
    const SecondEigen& e = c.eigen();
    run.constants["theta"] = e.theta;
    run.constants["theta2"] = e.theta2;
    run.constants["alpha"] = c.alpha();
    run.constants["power"] = c.power();
    run.constants["e2"] = e.e2;
    run.constants["e2_star"] = e.e2_star;
    run.constants["growth_constant"] = c.growth_constant();
    run.constants["max_levels"] = c.max_levels();
}

Profile default_profile(const FlowOpts& fo, int m) {
    if (!fo.profile.empty()) return parse_profile(fo.profile, m);
    if (m < 2) fail(ErrorKind::ConfigError, "default profile 1_[1] - 1_[2] needs two letters");
    std::vector<double> v(static_cast<size_t>(m), 0.0);
    v[0] = 1.0;
    v[1] = -1.0;
    return Profile::constant(v);
}

int cmd_flow(const Global& g, const std::string& sub, const FlowOpts& fo) {
    Config c = need_config(g);
    Run run = start_run(g, "flow " + sub, &c);
    Substitution z = config_substitution(c);
    SuspensionFlow f = config_flow(c, z);
    run.params["roof"] = f.self_similar ? "self-similar" : "explicit";
    if (sub == "log-holder") {
        auto omegas = parse_omegas(fo.omega, "", g.precision_bits);
        auto rs = parse_double_list(fo.r_grid);
        run.params["B"] = fo.B;
        run.params["omega"] = fo.omega;
        run.params["r_grid"] = fo.r_grid;
        run.params["letter"] = fo.letter;
        run.params["samples"] = fo.samples;
        auto cert = log_holder_certificate(f, fo.B, omegas, rs, parse_letter(fo.letter, z.size()), fo.samples);
        auto pa = prop_alg_constants(AlgebraicInteger::from_poly(cert.minpoly));
        run.constants["minimal_polynomial"] = cert.minpoly.str();
        run.constants["theta_Z"] = cert.theta_Z;
        run.constants["c1"] = cert.c1;
        run.constants["alpha"] = cert.alpha;
        if (cert.alpha_theta) run.constants["alpha_theta"] = *cert.alpha_theta;
        run.constants["beta"] = pa.beta;
        run.constants["gamma"] = cert.gamma;
        run.constants["K_flow"] = cert.K_flow;
        run.constants["C2_flow"] = cert.C2_flow;
        run.constants["C_B"] = cert.C_B;
        run.constants["C_omega"] = cert.C_omega;
        run.constants["R0"] = jnum(cert.R0);
        run.constants["r0"] = jnum(cert.r0);
        run.constants["N_max"] = cert.N_max;
        Csv csv({"omega", "r", "R", "in_regime", "bound", "fejer"});
        for (const auto& r : cert.rows) csv.row(r.omega, r.r, r.R, r.in_regime, r.bound, r.fejer);
        run.write("log_holder.csv", csv.str());
    } else if (sub == "cocycle") {
        Cocycle co(f, g.precision_bits);
        eigen_constants(run, co);
        auto ts = parse_double_list(fo.t);
        run.params["t"] = fo.t;
        run.params["anchors"] = fo.anchors;
        run.params["span"] = fo.span;
        int k = fo.k < 0 ? co.max_levels() : fo.k;
        run.params["k_levels"] = k;
        if (fo.anchors < 1) fail(ErrorKind::ConfigError, "--anchors must be >= 1");
        std::mt19937_64 rng(g.seed);
        std::uniform_real_distribution<double> U(0.0, 0.5);
        const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
        std::vector<double> X;
        for (int i = 0; i < fo.anchors; ++i) X.push_back((i + 1) * gold * fo.span + (g.seed ? U(rng) * fo.span : 0.0));
        std::vector<CocycleEvaluation> out(X.size() * ts.size());
        parallel_for(out.size(), g.threads, [&](size_t i) {
            out[i] = co.eval_at(Mp(g.precision_bits, X[i / ts.size()]), ts[i % ts.size()], k);
        });
        Csv csv({"anchor", "X", "t", "value", "error_bound", "k_used", "boundary_tiles"});
        for (size_t i = 0; i < out.size(); ++i)
            csv.row(static_cast<long>(i / ts.size()), X[i / ts.size()], out[i].t, out[i].value, out[i].error_bound,
                    out[i].k_used, out[i].boundary_tiles);
        run.write("cocycle.csv", csv.str());
    } else if (sub == "zero-scaling") {
        Cocycle co(f, g.precision_bits);
        eigen_constants(run, co);
        Profile psi = default_profile(fo, z.size());
        run.params["profile"] = psi.coeffs;
        run.params["N_lo"] = fo.N_lo;
        run.params["N_hi"] = fo.N_hi;
        run.params["windows"] = fo.windows;
        run.params["amplitude"] = fo.amplitude;
        auto zs = zero_scaling_experiment(co, psi, fo.N_lo, fo.N_hi, fo.windows, fo.amplitude, g.threads);
        run.constants["m_minus"] = zs.m_minus;
        run.constants["spread"] = zs.spread;
        run.constants["half_width"] = zs.half_width;
        run.constants["truncation"] = zs.truncation;
        Csv csv({"N", "T", "value", "ratio"});
        for (size_t i = 0; i < zs.N.size(); ++i) csv.row(zs.N[i], zs.T[i], zs.value[i], zs.ratio[i]);
        run.write("zero_scaling.csv", csv.str());
    } else if (sub == "decomposition") {
        Cocycle co(f, g.precision_bits);
        eigen_constants(run, co);
        Profile psi = default_profile(fo, z.size());
        std::vector<double> ts;
        for (int kk = fo.k_lo; kk <= fo.k_hi; ++kk) ts.push_back(std::pow(co.eigen().theta, kk));
        run.params["profile"] = psi.coeffs;
        run.params["k_lo"] = fo.k_lo;
        run.params["k_hi"] = fo.k_hi;
        run.params["anchor"] = fo.anchor;
        FlowPoint x = co.tiling().locate(Mp(g.precision_bits, fo.anchor));
        auto dec = ergodic_decomposition_check(co, psi, x, ts, fo.k);
        run.constants["m_minus"] = dec.m_minus;
        run.constants["max_exponent"] = jnum(dec.max_exponent);
        Csv csv({"t", "S", "phi2", "phi2_error", "main", "remainder", "exponent"});
        for (const auto& r : dec.rows) csv.row(r.t, r.S, r.phi2, r.phi2_error, r.main, r.remainder, r.exponent);
        run.write("decomposition.csv", csv.str());
    }
    run.finish("ok");
    return kOk;
}

// ---------------------------------------------------------------- dioph

struct DiophOpts {
    std::string poly;
    long t = 1;
    long N = 100;
    long fit_N = 10;
};

int cmd_dioph(const Global& g, const std::string& sub, const DiophOpts& dopt) {
    std::optional<Config> c;
    if (!g.config.empty()) c = load_config(g.config);
    Run run = start_run(g, "dioph " + sub, c ? &*c : nullptr);
    IntPoly p = resolve_poly(dopt.poly, c ? &*c : nullptr);
    if (dopt.N < 0) fail(ErrorKind::ConfigError, "--N must be >= 0");
    AlgebraicInteger a = AlgebraicInteger::from_poly(p);
    ZTheta t = ZTheta::integer(a.degree(), BigInt(dopt.t));
    run.params["poly"] = p.str();
    run.params["t"] = dopt.t;
    run.params["N"] = dopt.N;
    run.constants["classification"] = class_name(classify(a).cls);
    if (sub == "sequence") {
        auto seq = pisot_sequence(a, t, dopt.N + 1);
        run.precision["max_enclosure_error"] = seq.max_err;
        Csv csv({"k", "K", "eps", "eps_radius", "dist"});
        for (long k = 0; k < seq.size(); ++k) {
            Mp rad = seq.eps[k].width();
            csv.row(k, seq.K[k], seq.eps[k].mid().to_double(), rad.to_double() / 2.0, seq.dist[k]);
        }
        run.write("sequence.csv", csv.str());
    } else if (sub == "product") {
        if (dopt.N < 1) fail(ErrorKind::ConfigError, "product needs --N >= 1");
        auto pr = prop_alg_product(a, t, dopt.N, dopt.fit_N, g.diagnostic);
        run.params["fit_N"] = dopt.fit_N;
        run.constants["hypothesis_violated"] = pr.hypothesis_violated;
        if (pr.consts) {
            run.constants["delta1"] = pr.consts->delta1.get_str();
            run.constants["beta"] = pr.consts->beta;
            run.constants["H"] = pr.consts->H.get_str();
        }
        run.constants["alpha"] = pr.alpha;
        run.constants["C"] = pr.C;
        run.constants["prefactor"] = pr.prefactor;
        run.constants["N_start"] = pr.N_start;
        run.constants["bound_holds"] = pr.bound_holds;
        run.constants["first_violation"] = pr.first_violation;
        run.constants["monotone"] = pr.monotone;
        run.constants["slope"] = pr.slope;
        Csv csv({"n", "log_value", "bound", "holds"});
        for (long n = 1; n <= pr.N; ++n) {
            double v = pr.log_values[n - 1];
            double b = pr.bound(n);
            csv.row(n, v, b, n < pr.N_start || std::exp(v) <= b * (1 + 1e-12));
        }
        run.write("product.csv", csv.str());
    } else if (sub == "windows") {
        auto we = window_escape_check(a, t, std::nullopt, dopt.N, g.diagnostic);
        run.constants["delta1"] = we.delta1.get_str();
        run.constants["beta"] = we.beta;
        run.constants["K"] = we.K;
        run.constants["k0"] = we.k0;
        run.constants["hypothesis_violated"] = we.hypothesis_violated;
        bool all = !we.first_violation.has_value();
        run.constants["verdict"] = all ? "all-pass" : "fail";
        if (we.first_violation) run.constants["first_violation"] = *we.first_violation;
        Csv csv({"k", "end", "argmax", "max_dist", "pass"});
        for (const auto& w : we.windows) csv.row(w.k, w.end, w.argmax, w.max_dist, w.pass);
        run.write("windows.csv", csv.str());
        std::cout << "windows: " << (all ? "all-pass" : "fail") << " (" << we.windows.size() << " windows)\n";
    } else if (sub == "ek") {
        EKConstants ek = ek_constants(p);
        run.constants["rho"] = ek.rho;
        run.constants["L"] = ek.L;
        run.constants["x"] = ek.x;
        run.constants["theta1"] = ek.theta1;
        auto seq = pisot_sequence(a, t, dopt.N + 1);
        int m = ek.m();
        Csv csv({"n", "center", "nearest", "candidates", "actual", "unique", "hit"});
        long hits = 0, rows = 0;
        for (long n = 0; n + m < seq.size(); ++n) {
            std::vector<BigInt> w(seq.K.begin() + n, seq.K.begin() + n + m);
            auto sp = ek_step_predict(w, ek);
            const BigInt& act = seq.K[n + m];
            bool hit = std::find(sp.candidates.begin(), sp.candidates.end(), act) != sp.candidates.end();
            hits += hit;
            ++rows;
            csv.row(n, sp.center.to_double(), sp.nearest, static_cast<long>(sp.candidates.size()), act, sp.unique, hit);
        }
        run.constants["hits"] = hits;
        run.constants["predictions"] = rows;
        run.write("ek.csv", csv.str());
    }
    run.finish("ok");
    return kOk;
}

// ---------------------------------------------------------------- bernoulli

struct BernoulliOpts {
    std::string poly, lambda;
    double p = 0.5;
    int N_max = 40;
    std::string u_grid = "1,1.3,1.7";
    std::string xi = "0,0.25,1,10,100";
};

int cmd_bernoulli(const Global& g, const std::string& sub, const BernoulliOpts& bo) {
    std::optional<Config> c;
    if (!g.config.empty()) c = load_config(g.config);
    Run run = start_run(g, "bernoulli " + sub, c ? &*c : nullptr);
    if (!(bo.p > 0.0 && bo.p < 1.0)) fail(ErrorKind::ConfigError, "--p must lie in (0, 1)");
    run.params["p"] = bo.p;
    auto theta = [&] { return AlgebraicInteger::from_poly(resolve_poly(bo.poly, c ? &*c : nullptr)); };
    if (sub == "scan") {
        auto th = theta();
        auto u = parse_double_list(bo.u_grid);
        run.params["poly"] = th.poly().str();
        run.params["N_max"] = bo.N_max;
        run.params["u_grid"] = bo.u_grid;
        auto s = bc_log_decay_scan(th, bo.p, bo.N_max, u, g.threads);
        run.constants["alpha"] = s.alpha;
        run.constants["chain_constant"] = s.c;
        run.constants["sup"] = s.sup;
        run.constants["chain_ok"] = s.chain_ok;
        run.constants["octave_sup"] = s.octave_sup;
        run.constants["scan_at_zero"] = bc_scan_at_zero(s.alpha);
        Csv csv({"N", "u", "xi", "re", "im", "modulus", "abs_error", "bound_chain", "scan_value", "chain_holds"});
        for (const auto& r : s.rows)
            csv.row(r.N, r.u, r.xi, r.value.real(), r.value.imag(), r.modulus, r.abs_error, r.chain, r.scan,
                    r.chain_holds);
        run.write("bernoulli_scan.csv", csv.str());
    } else if (sub == "nondecay") {
        auto th = theta();
        run.params["poly"] = th.poly().str();
        run.params["N_max"] = bo.N_max;
        auto e = erdos_nondecay(th, bo.N_max);
        run.constants["floor"] = e.floor;
        Csv csv({"N", "value", "running_inf"});
        for (size_t n = 0; n < e.values.size(); ++n) csv.row(static_cast<long>(n), e.values[n], e.running_inf[n]);
        run.write("nondecay.csv", csv.str());
        std::cout << "floor: " << fmt(e.floor) << " over N <= " << bo.N_max << "\n";
    } else if (sub == "fourier") {
        BernoulliParams b = bo.lambda.empty()
                                ? BernoulliParams::from_theta(theta(), bo.p)
                                : BernoulliParams::from_lambda(Frequency::parse(bo.lambda, g.precision_bits)
                                                                   .to_mp(g.precision_bits),
                                                               bo.p);
        run.params["lambda"] = bo.lambda.empty() ? "1/theta" : bo.lambda;
        run.params["xi"] = bo.xi;
        auto xs = parse_double_list(bo.xi);
        std::vector<BCFourier> out(xs.size());
        parallel_for(xs.size(), g.threads, [&](size_t i) { out[i] = bc_fourier(b, xs[i]); });
        Csv csv({"xi", "re", "im", "modulus", "abs_error", "tail_log_bound", "n_terms"});
        for (size_t i = 0; i < xs.size(); ++i)
            csv.row(xs[i], out[i].value.real(), out[i].value.imag(), std::abs(out[i].value), out[i].abs_error,
                    out[i].tail_log_bound, out[i].n_terms);
        run.write("bernoulli_fourier.csv", csv.str());
    }
    run.finish("ok");
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral and Diophantine experiments for substitution systems and their suspension flows", "subdyn"};
    app.fallthrough();
    app.require_subcommand(1);
    Global g;
    app.add_option("--config", g.config, "substitution config (JSON or TOML subset)");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--precision-bits", g.precision_bits, "working precision in bits")->check(CLI::Range(64L, 1L << 20));
    app.add_option("--seed", g.seed, "seed for anchor jitter (0 = none)");
    app.add_flag("--diagnostic", g.diagnostic, "run hypothesis-violating inputs as diagnostics");

    std::function<int()> action;

    auto* inspect = app.add_subcommand("inspect", "matrix, PF data, classification, return word");
    inspect->callback([&] { action = [&] { return cmd_inspect(g); }; });

    SpectralOpts so;
    auto* spectral = app.add_subcommand("spectral", "product, Fejer and local-dimension bounds on an omega grid");
    spectral->add_option("--omega", so.omega, "comma-separated frequencies (overrides --omega-grid)");
    spectral->add_option("--omega-grid", so.grid, "lo:hi:count");
    spectral->add_option("--n", so.n, "level of the product bound");
    spectral->add_option("--letter", so.letter, "letter a (1-based)");
    spectral->add_option("--fejer-N", so.fejer_N, "Fejer window length");
    spectral->add_option("--samples", so.samples, "windows for G_N");
    spectral->callback([&] { action = [&] { return cmd_spectral(g, so); }; });

    FlowOpts fo;
    auto* flow = app.add_subcommand("flow", "suspension-flow experiments");
    flow->require_subcommand(1);
    auto* lh = flow->add_subcommand("log-holder", "log-Holder modulus certificate");
    lh->add_option("--B", fo.B, "frequency range [1/B, B]");
    lh->add_option("--omega", fo.omega, "comma-separated frequencies");
    lh->add_option("--r-grid", fo.r_grid, "comma-separated radii");
    lh->add_option("--letter", fo.letter, "letter a (1-based)");
    lh->add_option("--samples", fo.samples, "anchors for the Fejer comparison");
    auto* cc = flow->add_subcommand("cocycle", "Phi_2^+ along fixed-point anchors");
    cc->add_option("--t", fo.t, "comma-separated times");
    cc->add_option("--anchors", fo.anchors, "number of anchors");
    cc->add_option("--span", fo.span, "anchor spacing scale");
    cc->add_option("--k", fo.k, "subdivision levels (-1 = maximum)");
    auto* zs = flow->add_subcommand("zero-scaling", "spectral mass near zero at scales theta^N");
    zs->add_option("--N-lo", fo.N_lo, "first N");
    zs->add_option("--N-hi", fo.N_hi, "last N");
    zs->add_option("--windows", fo.windows, "windows per N");
    zs->add_option("--amplitude", fo.amplitude, "Gaussian amplitude");
    zs->add_option("--profile", fo.profile, "per-letter constants of f");
    auto* dc = flow->add_subcommand("decomposition", "S(f,x,t) = Phi_2^+ m + R");
    dc->add_option("--k-lo", fo.k_lo, "t grid starts at theta^k_lo");
    dc->add_option("--k-hi", fo.k_hi, "t grid ends at theta^k_hi");
    dc->add_option("--anchor", fo.anchor, "tiling coordinate of x");
    dc->add_option("--k", fo.k, "subdivision levels (-1 = maximum)");
    dc->add_option("--profile", fo.profile, "per-letter constants of f");
    for (auto* s : {lh, cc, zs, dc}) {
        std::string name = s->get_name();
        s->callback([&, name] { action = [&, name] { return cmd_flow(g, name, fo); }; });
    }

    DiophOpts dopt;
    auto* dioph = app.add_subcommand("dioph", "Pisot sequences, product bounds, window escapes, Erdos-Kahane steps");
    dioph->require_subcommand(1);
    const std::vector<std::pair<const char*, const char*>> dioph_subs{
        {"sequence", "k_n = nearest integer to t theta^n, with ||t theta^n||"},
        {"product", "exp(-sum_{k<N} ||t theta^k||^2) against C N^-alpha"},
        {"windows", "escape windows [k, beta k) with ||theta^i|| >= delta1"},
        {"ek", "Erdos-Kahane next-term prediction over a Pisot sequence"}};
    for (const auto& [name, help] : dioph_subs) {
        auto* s = dioph->add_subcommand(name, help);
        s->add_option("--poly", dopt.poly, "monic polynomial, leading coefficient first (1,-1,-3)");
        s->add_option("--t", dopt.t, "integer multiplier t");
        s->add_option("--N", dopt.N, "length");
        if (std::string(name) == "product") s->add_option("--fit-N", dopt.fit_N, "fit range for C");
        std::string nm = name;
        s->callback([&, nm] { action = [&, nm] { return cmd_dioph(g, nm, dopt); }; });
    }

    BernoulliOpts bo;
    auto* bern = app.add_subcommand("bernoulli", "Bernoulli convolution Fourier transforms");
    bern->require_subcommand(1);
    const std::vector<std::pair<const char*, const char*>> bern_subs{
        {"scan", "|hat nu(theta^N u)| (log(2 + xi))^alpha next to the chain bound"},
        {"nondecay", "|hat nu(theta^N)| for PV theta, with its running infimum"},
        {"fourier", "hat nu(xi) with a certified tail error"}};
    for (const auto& [name, help] : bern_subs) {
        auto* s = bern->add_subcommand(name, help);
        s->add_option("--poly", bo.poly, "minimal polynomial of theta = 1/lambda");
        s->add_option("--p", bo.p, "bias in (0, 1)");
        if (std::string(name) != "fourier") s->add_option("--N-max", bo.N_max, "largest N");
        if (std::string(name) == "scan") s->add_option("--u-grid", bo.u_grid, "points u in [1, theta]");
        if (std::string(name) == "fourier") {
            s->add_option("--lambda", bo.lambda, "lambda (overrides --poly)");
            s->add_option("--xi", bo.xi, "comma-separated frequencies");
        }
        std::string nm = name;
        s->callback([&, nm] { action = [&, nm] { return cmd_bernoulli(g, nm, bo); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kConfig;
    }
    try {
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
}
