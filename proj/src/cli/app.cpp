#include "cyber/cli/app.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <openssl/evp.h>

#include "config.hpp"
#include "cyber/core/parallel.hpp"

namespace cyber::cli {

namespace {

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read config file '" + p.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& body)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << body;
}

json parse_json(std::string_view text)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
}

struct Planned {
    json config;
    Runner runner;
    std::uint64_t seed = 0;
};

Planned plan(std::string_view text)
{
    Planned p;
    p.config = parse_json(text);
    const Node root(p.config, "");
    if (!p.config.is_object()) root.fail("expected an object at the top level");
    p.seed = root.find("seed") ? root.at("seed").integer() : 0;
    p.runner = plan_scenario(root);
    return p;
}

}  // namespace

std::string Diagnostic::str() const
{
    return (path.empty() ? "/" : path) + ": " + message;
}

const std::vector<std::string>& scenario_kinds()
{
    static const std::vector<std::string> kinds{"frequency-sim",   "collective-sim",   "epidemic-sim",
                                                "closure-compare", "population-sir",   "game",
                                                "price-classical", "price-systematic", "price-systemic"};
    return kinds;
}

std::vector<Diagnostic> validate_text(std::string_view text)
{
    try {
        plan(text);
    } catch (const ConfigError& e) {
        return {{e.path, e.message}};
    } catch (const ValidationError& e) {
        return {{"", e.what()}};
    }
    return {};
}

std::vector<Diagnostic> validate_config(const std::filesystem::path& config)
{
    return validate_text(read_file(config));
}

std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

std::string config_digest(std::string_view json_text)
{
    return sha256_hex(parse_json(json_text).dump());
}

std::string version()
{
    return "0.1.0";
}

int run_scenario(const std::filesystem::path& config, const RunOptions& options, std::ostream& err)
{
    try {
        const std::string text = read_file(config);
        Planned p = plan(text);
        if (options.threads) set_thread_count(*options.threads);
        const std::uint64_t seed = options.seed.value_or(p.seed);
        Output out;
        p.runner(SeedStream(seed), out);

        std::filesystem::create_directories(options.out);
        write_file(options.out / "results.csv", out.results_csv);
        write_file(options.out / "summary.json", out.summary.dump(2) + "\n");
        json files = json::array({"results.csv", "summary.json"});
        for (const auto& [name, body] : out.extra_files) {
            write_file(options.out / name, body);
            files.push_back(name);
        }
        json manifest;
        manifest["tool"] = "cyberrisk";
        manifest["version"] = version();
        manifest["kind"] = p.config["kind"];
        manifest["config_digest"] = sha256_hex(p.config.dump());
        manifest["seed"] = seed;
        manifest["libraries"] = {
            {"boost", BOOST_LIB_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
        manifest["outputs"] = files;
        manifest["results_sha256"] = sha256_hex(out.results_csv);
        write_file(options.out / "manifest.json", manifest.dump(2) + "\n");
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "validation error: " << Diagnostic{e.path, e.message}.str() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << '\n';
        return kExitModel;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace cyber::cli
