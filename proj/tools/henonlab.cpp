/*
* Copyright (C) 2026 henonlab authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
// henonlab: command-line front end.
//
//   henonlab [--map M | --benchmark K] [--mode PaperFaithful|Relaxed] [--seed S] [--threads T]
//            [--out DIR] [--config FILE] <command> ...
//
// Exit status: 0 success, 2 a checked inequality failed, 1 anything else.

#include <boost/version.hpp>
#include <gmp.h>
#include <mpfr.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "henon.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace henon;

namespace
{

constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    std::string map_path;
    int benchmark = 0;
    std::string mode = "Relaxed";
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "henonlab-out";
    GreenParams green;
    long relaxed_samples = 100000;
    int w_grid = 100;
    int theta_boundary = 64;
    int max_auto_depth = 40;
    std::vector<double> ray{1, 0, 0, 0};
    double R_override = 0; // replaces the chosen R when positive

    json to_json() const
    {
        return {{"map", map_path.empty() ? json(nullptr) : json(map_path)},
                {"benchmark", map_path.empty() ? json(benchmark) : json(nullptr)},
                {"mode", mode},
                {"seed", seed},
                {"threads", threads},
                {"out", out},
                {"escape_radius", green.escape_radius},
                {"max_iter", green.max_iter},
                {"tol", green.tol},
                {"relaxed_samples", relaxed_samples},
                {"w_grid", w_grid},
                {"theta_boundary", theta_boundary},
                {"max_auto_depth", max_auto_depth},
                {"ray", ray},
                {"R", R_override > 0 ? json(R_override) : json(nullptr)}};
    }
};

void apply_config_file(const std::string& path, RunConfig& c)
{
    const json j = json::parse(read_file(path));
    auto get     = [&](const char* key, auto& dst) {
        if (j.contains(key) && !j.at(key).is_null())
            dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get("map", c.map_path);
    get("benchmark", c.benchmark);
    get("mode", c.mode);
    get("seed", c.seed);
    get("threads", c.threads);
    get("out", c.out);
    get("escape_radius", c.green.escape_radius);
    get("max_iter", c.green.max_iter);
    get("tol", c.green.tol);
    get("relaxed_samples", c.relaxed_samples);
    get("w_grid", c.w_grid);
    get("theta_boundary", c.theta_boundary);
    get("max_auto_depth", c.max_auto_depth);
    get("ray", c.ray);
    get("R", c.R_override);
    if (c.ray.size() != 4)
        throw CLI::ValidationError("--config", "ray must have four entries (re z, im z, re w, im w)");
}

/// "3", "1e6", "1+2i", "-0.5-1e-3i" or "re,im".
Complex parse_complex(const std::string& s, const std::string& what)
{
    try {
        const auto comma = s.find(',');
        if (comma != std::string::npos)
            return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
        if (!s.empty() && s.back() == 'i') {
            const std::string body = s.substr(0, s.size() - 1);
            // Split at the last sign that is not an exponent sign.
            for (std::size_t k = body.size(); k-- > 1;) {
                if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                    const std::string im = body.substr(k);
                    return {std::stod(body.substr(0, k)), im == "+" || im == "-" ? std::stod(im + "1") : std::stod(im)};
                }
            }
            return {0.0, body.empty() || body == "+" ? 1.0 : body == "-" ? -1.0 : std::stod(body)};
        }
        std::size_t used = 0;
        const double v   = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return {v, 0.0};
    }
    catch (const std::logic_error&) {
        throw CLI::ValidationError(what, "cannot parse '" + s + "' as a complex number");
    }
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& what)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    try {
        while (std::getline(ss, item, ','))
            v.push_back(std::stod(item));
    }
    catch (const std::logic_error&) {
        throw CLI::ValidationError(what, "cannot parse '" + s + "'");
    }
    if (v.size() != n)
        throw CLI::ValidationError(what, "expected " + std::to_string(n) + " comma-separated numbers, got '" + s + "'");
    return v;
}

class Session
{
public:
    explicit Session(RunConfig cfg) : cfg_(std::move(cfg)), t0_(std::chrono::steady_clock::now())
    {
        fs::create_directories(cfg_.out);
        if (!cfg_.map_path.empty()) {
            map_doc_ = read_file(cfg_.map_path);
            sys_     = system_from_json(json::parse(map_doc_));
        }
        else {
            if (cfg_.benchmark < 0 || cfg_.benchmark > 2)
                throw CLI::ValidationError("--benchmark", "must be 0, 1 or 2");
            sys_     = benchmark_system(cfg_.benchmark);
            map_doc_ = system_to_json(sys_).dump();
        }
        mode_ = mode_from_name(cfg_.mode);
    }

    const HenonSystem& system() const { return sys_; }
    const RunConfig& config() const { return cfg_; }
    ConstantsMode mode() const { return mode_; }

    const FiltrationConstants& constants()
    {
        if (!k_) {
            ConstantsOptions opt;
            opt.seed            = cfg_.seed;
            opt.relaxed_samples = cfg_.relaxed_samples;
            k_                  = choose_constants(sys_, mode_, opt);
            if (cfg_.R_override > 0)
                k_->R = cfg_.R_override;
        }
        return *k_;
    }

    double large_c() { return min_large_c(sys_, constants(), cfg_.w_grid, cfg_.green); }

    std::vector<Complex> grid() const { return theta_grid(cfg_.theta_boundary); }

    TracerOptions tracer() const
    {
        TracerOptions o;
        o.max_auto_depth = cfg_.max_auto_depth;
        return o;
    }

    AffinePoint ray() const { return {{cfg_.ray[0], cfg_.ray[1]}, {cfg_.ray[2], cfg_.ray[3]}}; }

    void emit(const std::string& name, const std::string& content)
    {
        write_file((fs::path(cfg_.out) / name).string(), content);
        files_[name] = hex64(fnv1a(content));
    }

    void emit_json(const std::string& name, const json& j) { emit(name, j.dump(2) + "\n"); }

    void record_file(const std::string& name)
    {
        files_[name] = hex64(fnv1a(read_file((fs::path(cfg_.out) / name).string())));
    }

    void lap(const std::string& what)
    {
        const auto now = std::chrono::steady_clock::now();
        timings_[what] = std::chrono::duration<double, std::milli>(now - t0_).count();
    }

    /// manifest.json: configuration and its hash, library versions, timings, and a
    /// hash of every file written by the run. Timings are the only run-dependent field.
    void write_manifest(const std::string& command, const std::vector<std::string>& args, int status)
    {
        lap("total");
        const json cfgj = cfg_.to_json();
        json files      = json::array();
        for (const auto& [name, h] : files_)
            files.push_back({{"path", name}, {"fnv1a", h}});
        json timings = json::object();
        for (const auto& [k, v] : timings_)
            timings[k] = v;
        const json m = {{"command", command},
                        {"arguments", args},
                        {"exit_status", status},
                        {"config", cfgj},
                        {"config_hash", hex64(fnv1a(cfgj.dump()))},
                        {"map_hash", hex64(fnv1a(map_doc_))},
                        {"versions",
                         {{"henonlab", kVersion},
                          {"mpfr", mpfr_get_version()},
                          {"gmp", gmp_version},
                          {"boost", BOOST_LIB_VERSION}}},
                        {"timings_ms", timings},
                        {"files", files}};
        write_file((fs::path(cfg_.out) / "manifest.json").string(), m.dump(2) + "\n");
    }

private:
    RunConfig cfg_;
    HenonSystem sys_;
    std::string map_doc_;
    ConstantsMode mode_ = ConstantsMode::Relaxed;
    std::optional<FiltrationConstants> k_;
    std::map<std::string, std::string> files_;
    std::map<std::string, double> timings_;
    std::chrono::steady_clock::time_point t0_;
};

// ---- commands -------------------------------------------------------------------------

int cmd_green(Session& s, const std::string& zs, const std::string& ws)
{
    const AffinePoint p{parse_complex(zs, "z"), parse_complex(ws, "w")};
    const auto& gp   = s.config().green;
    const auto gplus = green_plus(s.system(), p, gp);
    const auto gmin  = green_minus(s.system(), p, gp);
    json j           = {{"z", complex_to_json(p.z)},
                        {"w", complex_to_json(p.w)},
                        {"g_plus", gplus.value},
                        {"g_plus_status", status_name(gplus.status)},
                        {"g_plus_iterations", gplus.iterations},
                        {"g_minus", gmin.value},
                        {"g_minus_status", status_name(gmin.status)},
                        {"g_minus_iterations", gmin.iterations}};
    s.lap("green");
    s.emit_json("green.json", j);
    std::cout << "g+ = " << fmt_double(gplus.value) << " (" << status_name(gplus.status) << ", " << gplus.iterations
              << " iterations)\n"
              << "g- = " << fmt_double(gmin.value) << " (" << status_name(gmin.status) << ", " << gmin.iterations
              << " iterations)\n";
    return 0;
}

int cmd_render(Session& s, const std::string& window, const std::string& res, const std::string& slice,
               const std::string& fixed)
{
    const auto w = parse_list(window, 4, "window");
    int nx = 0, ny = 0;
    if (std::sscanf(res.c_str(), "%dx%d", &nx, &ny) != 2 || nx < 1 || ny < 1)
        throw CLI::ValidationError("res", "expected NXxNY with positive sizes, got '" + res + "'");
    const auto comma = slice.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("slice", "expected two axes such as rez,rew");
    Slice sl;
    try {
        sl.x_axis = axis_from_name(slice.substr(0, comma));
        sl.y_axis = axis_from_name(slice.substr(comma + 1));
    }
    catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("slice", e.what());
    }
    if (sl.x_axis == sl.y_axis)
        throw CLI::ValidationError("slice", "axes must differ");
    const auto fx = parse_list(fixed, 4, "--fixed");
    for (int k = 0; k < 4; ++k)
        sl.fixed[k] = fx[k];
    const auto grid = render_grid(s.system(), Window{w[0], w[1], w[2], w[3]}, Resolution{nx, ny}, sl, s.config().green,
                                  s.config().threads);
    s.lap("render");
    const std::string out = s.config().out;
    write_green_png((fs::path(out) / "green.png").string(), grid);
    s.record_file("green.png");
    write_green_csv((fs::path(out) / "green.csv").string(), grid);
    s.record_file("green.csv");
    long escaped = 0;
    double gmax  = 0;
    for (const auto& v : grid.values) {
        escaped += v.status == GreenStatus::Escaped;
        gmax = std::max(gmax, v.value);
    }
    s.emit_json("render.json", {{"window", w},
                                {"resolution", {nx, ny}},
                                {"slice", slice},
                                {"fixed", fx},
                                {"escaped", escaped},
                                {"bounded", (long)grid.values.size() - escaped},
                                {"g_max", gmax}});
    std::cout << nx << "x" << ny << " grid, " << escaped << " escaped, max g+ " << fmt_double(gmax) << "\n";
    return 0;
}

int cmd_constants(Session& s)
{
    const auto& k  = s.constants();
    const double c = s.large_c();
    json j         = to_json(k);
    j["min_large_c"] = c;
    s.lap("constants");
    s.emit_json("constants.json", j);
    std::cout << mode_name(k.mode) << ": R = " << fmt_double(k.R) << ", c_vplus = " << fmt_double(k.c_vplus)
              << ", c_phi = " << fmt_double(k.c_phi) << ", min large c = " << fmt_double(c) << "\n";
    return 0;
}

int cmd_filtration(Session& s, long n)
{
    if (n < 1)
        throw CLI::ValidationError("n", "sample count must be positive");
    const auto rep = verify_filtration(s.system(), s.constants(), n, s.config().seed, s.config().green.max_iter);
    s.lap("filtration");
    json j         = to_json(rep);
    j["constants"] = to_json(s.constants());
    s.emit_json("filtration.json", j);
    std::cout << rep.samples << " samples, " << rep.violations << " violations\n";
    require_filtration(rep);
    return 0;
}

double parse_level(Session& s, const std::string& cs)
{
    if (cs == "auto")
        return s.large_c();
    try {
        return std::stod(cs);
    }
    catch (const std::logic_error&) {
        throw CLI::ValidationError("c", "expected a number or 'auto', got '" + cs + "'");
    }
}

int cmd_leaf(Session& s, const std::string& cs, const std::string& ds, int grid_n)
{
    const double c = parse_level(s, cs);
    int depth      = -1;
    if (ds != "auto") {
        try {
            depth = std::stoi(ds);
        }
        catch (const std::logic_error&) {
            throw CLI::ValidationError("depth", "expected an integer or 'auto', got '" + ds + "'");
        }
    }
    if (grid_n < 1)
        throw CLI::ValidationError("grid", "boundary sample count must be positive");
    const auto& k        = s.constants();
    const LeafParam L    = make_leaf(s.system(), k, c, s.ray(), depth, s.config().green, s.tracer());
    const DiscTracer tr(s.system(), k, L, s.tracer());
    const auto thetas    = theta_grid(grid_n);
    std::ostringstream csv;
    csv << "theta_re,theta_im,z_re,z_im,w_re,w_im,g_plus,fs_norm\n";
    double gerr = 0, lerr = 0, perr = 0;
    std::vector<DiscChain> chains;
    for (const auto& th : thetas) {
        const DiscChain ch = tr.trace(th);
        const LeafCheck lc = check_leaf_point(tr, th);
        gerr = std::max(gerr, lc.green_error);
        lerr = std::max(lerr, lc.logmag_error);
        perr = std::max(perr, lc.phase_error);
        precision_scope scope(tr.bits());
        const auto& P   = ch.points.front();
        const double ln = fs_log_norm(P, ch.tangents.front().first, ch.tangents.front().second);
        csv << fmt_double(th.real()) << ',' << fmt_double(th.imag()) << ',' << format_real(P.z.re) << ','
            << format_real(P.z.im) << ',' << format_real(P.w.re) << ',' << format_real(P.w.im) << ','
            << fmt_double(lc.green_value) << ',' << format_from_log(ln, 17) << '\n';
        chains.push_back(ch);
    }
    const double tol = 1e-6 * std::max(1.0, c);
    s.lap("leaf");
    s.emit("leaf.csv", csv.str());
    const json j = {{"c", c},
                    {"depth", L.depth},
                    {"base", {complex_to_json(L.base.z), complex_to_json(L.base.w)}},
                    {"s_phase", L.s_phase},
                    {"precision_bits", tr.bits()},
                    {"samples", thetas.size()},
                    {"max_green_error", gerr},
                    {"green_tolerance", tol},
                    {"max_logmag_error", lerr},
                    {"max_phase_error", perr},
                    {"chain_verticality", chain_verticality(chains, k)},
                    {"mode", mode_name(k.mode)}};
    s.emit_json("leaf.json", j);
    std::cout << thetas.size() << " disc points at depth " << L.depth << ", max |g+ - c| = " << gerr
              << ", max log|x| error = " << lerr << "\n";
    if (gerr > tol || lerr > 1e-8)
        throw CheckFailure("traced disc leaves the level set beyond tolerance");
    return 0;
}

int cmd_brody(Session& s, const std::string& cs, int nmin, int nmax)
{
    const double c    = parse_level(s, cs);
    const auto& k     = s.constants();
    const LeafParam L = make_leaf(s.system(), k, c, s.ray(), nmin, s.config().green, s.tracer());
    const auto rep    = brody_ratio_sequence(s.system(), k, L, nmin, nmax, s.grid(), s.tracer());
    s.lap("brody");
    s.emit_json("brody.json", to_json(rep));
    s.emit("brody_cases.csv", case_table_csv(rep));
    for (std::size_t j = 0; j < rep.n_values.size(); ++j)
        std::cout << "n = " << rep.n_values[j] << ": base " << format_from_log(rep.log_base_norms[j]) << ", sup/base "
                  << format_from_log(rep.log_ratios[j]) << "\n";
    require_bounds(rep);
    return 0;
}

int cmd_certify(Session& s, const std::string& path, int N)
{
    if (N < 1)
        throw CLI::ValidationError("N", "vanishing order must be positive");
    const json doc = json::parse(read_file(path));
    if (!doc.contains("z") || !doc.contains("t"))
        throw CLI::ValidationError("series", "file needs 'z' and 't' series");
    const int vz = doc.at("z").at("valuation").get<int>();
    const int vt = doc.at("t").at("valuation").get<int>();
    const LaurentSeries z = series_from_json(doc.at("z"), default_trunc_order(vz, N));
    const LaurentSeries t = series_from_json(doc.at("t"), default_trunc_order(vt, N));
    const Certificate cert = certify_no_curve(s.system(), z, t, N);
    s.lap("certify");
    s.emit_json("certificate.json", to_json(cert));
    std::cout << verdict_name(cert.verdict) << " at step " << cert.step << " (" << cert.relation << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Henon map dynamics: Green functions, filtrations, leaves and Brody bounds"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string config_path, mode;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, benchmark;
    std::optional<std::string> out, map_path;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--map", map_path, "JSON map document")->check(CLI::ExistingFile);
    app.add_option("--benchmark", benchmark, "built-in map 0, 1 or 2 (used when --map is absent)");
    app.add_option("--mode", mode, "filtration constants: PaperFaithful or Relaxed")
        ->check(CLI::IsMember({"PaperFaithful", "Relaxed", "faithful", "relaxed"}));
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output directory");

    std::string gz, gw;
    auto* green = app.add_subcommand("green", "g+ and g- at a point");
    green->add_option("z", gz, "z coordinate")->required();
    green->add_option("w", gw, "w coordinate")->required();

    std::string window, res, slice, fixed = "0,0,0,0";
    auto* render = app.add_subcommand("render", "g+ over a 2D slice to PNG and CSV");
    render->add_option("window", window, "x0,x1,y0,y1")->required();
    render->add_option("res", res, "NXxNY")->required();
    render->add_option("slice", slice, "two axes among rez, imz, rew, imw, e.g. rez,rew")->required();
    render->add_option("--fixed", fixed, "values of the four real coordinates off the slice (re z, im z, re w, im w)");

    auto* constants = app.add_subcommand("constants", "filtration constants and the minimal large level");

    long nsamples = 10000;
    auto* filt    = app.add_subcommand("filtration-verify", "sample the filtration invariance");
    filt->add_option("n", nsamples, "samples per region")->required();

    std::string lc = "auto", ldepth = "auto";
    int lgrid = 64;
    auto* leaf = app.add_subcommand("leaf", "trace a disc in a leaf of {g+ = c}");
    leaf->add_option("c", lc, "level or 'auto'")->required();
    leaf->add_option("depth", ldepth, "depth or 'auto'")->required();
    leaf->add_option("grid", lgrid, "boundary samples")->required();

    std::string bc = "auto";
    int nmin = 1, nmax = 6;
    auto* brody = app.add_subcommand("brody", "Fubini-Study profiles and case bounds for n in [nmin, nmax]");
    brody->add_option("c", bc, "level or 'auto'")->required();
    brody->add_option("nmin", nmin, "first depth")->required();
    brody->add_option("nmax", nmax, "last depth")->required();

    std::string spath;
    int N = 0;
    auto* certify = app.add_subcommand("certify", "exclude a curve germ through I+ in the closure of a level set");
    certify->add_option("series", spath, "JSON file with series z and t")->required()->check(CLI::ExistingFile);
    certify->add_option("N", N, "vanishing order of t")->required();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    std::string command;
    std::vector<std::string> args;
    for (auto* sub : app.get_subcommands()) {
        command = sub->get_name();
        for (const auto* opt : sub->get_options())
            if (opt->get_positional())
                for (const auto& r : opt->results())
                    args.push_back(r);
    }

    std::optional<Session> session;
    int status = 0;
    try {
        if (!config_path.empty())
            apply_config_file(config_path, cfg);
        if (map_path)
            cfg.map_path = *map_path;
        if (benchmark) {
            cfg.benchmark = *benchmark;
            if (!map_path)
                cfg.map_path.clear();
        }
        if (!mode.empty())
            cfg.mode = mode;
        if (seed)
            cfg.seed = *seed;
        if (threads)
            cfg.threads = *threads;
        if (out)
            cfg.out = *out;
        cfg.mode = mode_name(mode_from_name(cfg.mode));
        session.emplace(cfg);
        Session& s = *session;
        if (*green)
            status = cmd_green(s, gz, gw);
        else if (*render)
            status = cmd_render(s, window, res, slice, fixed);
        else if (*constants)
            status = cmd_constants(s);
        else if (*filt)
            status = cmd_filtration(s, nsamples);
        else if (*leaf)
            status = cmd_leaf(s, lc, ldepth, lgrid);
        else if (*brody)
            status = cmd_brody(s, bc, nmin, nmax);
        else if (*certify)
            status = cmd_certify(s, spath, N);
    }
    catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 1;
    }
    catch (const CheckFailure& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        status = 2;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 1;
    }
    if (session) {
        try {
            session->write_manifest(command, args, status);
        }
        catch (const std::exception& e) {
            std::cerr << "error: cannot write manifest: " << e.what() << "\n";
            return 1;
        }
    }
    return status;
}
