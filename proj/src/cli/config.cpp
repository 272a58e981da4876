#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "diner/cli/config.hpp"
#include "diner/errors.hpp"

namespace diner::cli {

namespace {

using boost::property_tree::ptree;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string join(const auto& values, auto&& format) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) {
            out += ',';
        }
        out += format(v);
    }
    return out;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

std::string where(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
}

double to_double(const std::string& s, const std::string& ctx) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(ctx + ": expected a number, got '" + s + "'");
    }
    return v;
}

std::uint64_t to_uint(const std::string& s, const std::string& ctx) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(ctx + ": expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& s, const std::string& ctx) {
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    throw ConfigError(ctx + ": expected true or false, got '" + s + "'");
}

const char* kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::diner: return "diner";
    case ModelKind::positional: return "positional";
    case ModelKind::raw: return "raw";
    }
    return "?";
}

ModelKind parse_kind(const std::string& s, const std::string& ctx) {
    if (s == "diner") return ModelKind::diner;
    if (s == "positional" || s == "pe") return ModelKind::positional;
    if (s == "raw") return ModelKind::raw;
    throw ConfigError(ctx + ": unknown model kind '" + s + "' (diner, positional, raw)");
}

// Every recognised key, so that typos are reported instead of ignored.
const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"task", "seed", "precision", "out_dir"}},
        {"data",
         {"input", "inputs", "synthetic", "height", "width", "channels", "base_channels", "value",
          "corpus_size", "permute"}},
        {"model",
         {"kind", "hidden_width", "hidden_layers", "activation", "omega0", "table_width",
          "hash_init", "hash_init_scale", "pe_frequencies"}},
        {"train",
         {"epochs", "batch_size", "lr_net", "lr_hash", "log_every", "record_time", "freeze_table"}},
        {"disorder", {"permutations"}},
        {"sweep", {"widths"}},
        {"spectrum", {"bands", "measure", "resolution"}},
        {"lensless", {"measurements", "distances", "wavelength", "pixel_pitch", "parameterization"}},
        {"bench", {"lengths", "batch", "repeats"}},
    };
    return keys;
}

void apply(ExperimentConfig& cfg, const std::string& section, const std::string& key,
           const std::string& value) {
    const auto ctx = where(section, key);
    auto uint = [&] { return static_cast<std::size_t>(to_uint(value, ctx)); };
    auto real = [&] { return to_double(value, ctx); };
    try {
        if (section == "experiment") {
            if (key == "task") cfg.task = parse_task(value);
            else if (key == "seed") cfg.seed = to_uint(value, ctx);
            else if (key == "precision") cfg.precision = parse_precision(value);
            else if (key == "out_dir") cfg.out_dir = value;
        } else if (section == "data") {
            auto& d = cfg.data;
            if (key == "input") d.input = value;
            else if (key == "inputs") {
                d.inputs.clear();
                for (const auto& p : split(value)) d.inputs.emplace_back(p);
            } else if (key == "synthetic") {
                if (value != "natural" && value != "constant" && value != "rank_deficient") {
                    throw ConfigError(ctx + ": unknown synthetic image '" + value +
                                      "' (natural, constant, rank_deficient)");
                }
                d.synthetic = value;
            } else if (key == "height") d.height = uint();
            else if (key == "width") d.width = uint();
            else if (key == "channels") d.channels = uint();
            else if (key == "base_channels") d.base_channels = uint();
            else if (key == "value") d.value = real();
            else if (key == "corpus_size") d.corpus_size = uint();
            else if (key == "permute") d.permute = to_bool(value, ctx);
        } else if (section == "model") {
            auto& m = cfg.model;
            if (key == "kind") m.kind = parse_kind(value, ctx);
            else if (key == "hidden_width") m.hidden_width = uint();
            else if (key == "hidden_layers") m.hidden_layers = uint();
            else if (key == "activation") m.activation.kind = parse_activation_kind(value);
            else if (key == "omega0") m.activation.omega0 = real();
            else if (key == "table_width") m.table_width = uint();
            else if (key == "hash_init") {
                if (value == "zeros") m.hash_init.mode = HashInit::zeros;
                else if (value == "uniform") m.hash_init.mode = HashInit::uniform;
                else throw ConfigError(ctx + ": unknown init '" + value + "' (zeros, uniform)");
            } else if (key == "hash_init_scale") {
                m.hash_init.low = -real();
                m.hash_init.high = -m.hash_init.low;
            } else if (key == "pe_frequencies") m.pe_frequencies = uint();
        } else if (section == "train") {
            auto& t = cfg.train;
            if (key == "epochs") t.epochs = uint();
            else if (key == "batch_size") t.batch_size = uint();
            else if (key == "lr_net") t.lr_net = real();
            else if (key == "lr_hash") t.lr_hash = real();
            else if (key == "log_every") t.log_every = uint();
            else if (key == "record_time") t.record_time = to_bool(value, ctx);
            else if (key == "freeze_table") t.freeze_table = to_bool(value, ctx);
        } else if (section == "disorder") {
            cfg.permutations = uint();
        } else if (section == "sweep") {
            cfg.widths.clear();
            for (const auto& w : split(value)) cfg.widths.push_back(to_uint(w, ctx));
        } else if (section == "spectrum") {
            if (key == "bands") cfg.bands = uint();
            else if (key == "measure") cfg.measure = parse_band_measure(value);
            else if (key == "resolution") cfg.extract_resolution = uint();
        } else if (section == "lensless") {
            auto& l = cfg.lensless;
            if (key == "measurements") l.measurements = value;
            else if (key == "distances") {
                l.distances.clear();
                for (const auto& z : split(value)) l.distances.push_back(to_double(z, ctx));
            } else if (key == "wavelength") l.wavelength = real();
            else if (key == "pixel_pitch") l.pixel_pitch = real();
            else if (key == "parameterization") l.parameterization = parse_field_param(value);
        } else if (section == "bench") {
            if (key == "lengths") {
                cfg.bench.lengths.clear();
                for (const auto& n : split(value)) cfg.bench.lengths.push_back(to_uint(n, ctx));
            } else if (key == "batch") cfg.bench.batch = uint();
            else if (key == "repeats") cfg.bench.repeats = uint();
        }
    } catch (const ValidationError& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

void validate(const ExperimentConfig& cfg) {
    const auto& m = cfg.model;
    if (m.hidden_width == 0) throw ConfigError("[model] hidden_width must be at least 1");
    if (m.table_width == 0) throw ConfigError("[model] table_width must be at least 1");
    if (!(m.activation.omega0 > 0)) throw ConfigError("[model] omega0 must be positive");
    if (!(m.hash_init.high >= m.hash_init.low)) {
        throw ConfigError("[model] hash_init_scale must be non-negative");
    }
    const auto& d = cfg.data;
    if (d.height == 0 || d.width == 0 || d.channels == 0) {
        throw ConfigError("[data] height, width and channels must be positive");
    }
    if (d.synthetic == "rank_deficient" && (d.base_channels == 0 || d.base_channels > d.channels)) {
        throw ConfigError("[data] base_channels must lie in [1, channels]");
    }
    const auto& t = cfg.train;
    if (t.log_every == 0) throw ConfigError("[train] log_every must be at least 1");
    if (!(t.lr_net > 0) || !(t.lr_hash > 0)) {
        throw ConfigError("[train] learning rates must be positive");
    }
    for (const auto w : cfg.widths) {
        if (w == 0) throw ConfigError("[sweep] widths must be at least 1");
    }
    if (cfg.bands == 0) throw ConfigError("[spectrum] bands must be at least 1");
    if (cfg.task == Task::spectrum && (cfg.model.kind != ModelKind::diner || m.table_width != 2)) {
        throw ConfigError("spectrum task needs a DINER model with table_width = 2");
    }
    if (cfg.task == Task::spectrum && d.inputs.empty() && d.corpus_size == 0) {
        throw ConfigError("[data] corpus_size must be at least 1");
    }
    if (cfg.task == Task::lensless) {
        if (cfg.model.kind != ModelKind::diner) {
            throw ConfigError("lensless task needs a DINER model");
        }
        if (cfg.lensless.distances.empty()) {
            throw ConfigError("[lensless] distances must not be empty");
        }
        if (!(cfg.lensless.wavelength > 0) || !(cfg.lensless.pixel_pitch > 0)) {
            throw ConfigError("[lensless] wavelength and pixel_pitch must be positive");
        }
    }
    if (cfg.task == Task::bench_hash) {
        if (cfg.bench.lengths.empty() || cfg.bench.batch == 0 || cfg.bench.repeats == 0) {
            throw ConfigError("[bench] lengths, batch and repeats must be non-empty and positive");
        }
        for (const auto n : cfg.bench.lengths) {
            if (n < cfg.bench.batch) {
                throw ConfigError("[bench] every length must hold at least one batch");
            }
        }
    }
}

} // namespace

const char* to_string(Task t) {
    switch (t) {
    case Task::fit: return "fit";
    case Task::disorder_test: return "disorder-test";
    case Task::width_sweep: return "width-sweep";
    case Task::spectrum: return "spectrum";
    case Task::lensless: return "lensless";
    case Task::bench_hash: return "bench-hash";
    }
    return "?";
}

Task parse_task(const std::string& name) {
    for (const auto t : {Task::fit, Task::disorder_test, Task::width_sweep, Task::spectrum,
                         Task::lensless, Task::bench_hash}) {
        if (name == to_string(t)) {
            return t;
        }
    }
    throw ConfigError("unknown task '" + name +
                      "' (fit, disorder-test, width-sweep, spectrum, lensless, bench-hash)");
}

const char* to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

Precision parse_precision(const std::string& name) {
    if (name == "f32") return Precision::f32;
    if (name == "f64") return Precision::f64;
    throw ConfigError("unknown precision '" + name + "' (f32, f64)");
}

void ExperimentConfig::apply_seed(std::uint64_t s) {
    seed = s;
    train.seed = s;
    model.hash_init.seed = s;
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    auto size = [](std::size_t v) { return std::to_string(v); };
    auto path = [](const std::filesystem::path& p) { return p.string(); };
    os << "[experiment]\n"
       << "task = " << to_string(task) << '\n'
       << "seed = " << seed << '\n'
       << "precision = " << to_string(precision) << '\n';
    os << "\n[data]\n"
       << "input = " << data.input.string() << '\n'
       << "inputs = " << join(data.inputs, path) << '\n'
       << "synthetic = " << data.synthetic << '\n'
       << "height = " << data.height << '\n'
       << "width = " << data.width << '\n'
       << "channels = " << data.channels << '\n'
       << "base_channels = " << data.base_channels << '\n'
       << "value = " << fmt(data.value) << '\n'
       << "corpus_size = " << data.corpus_size << '\n'
       << "permute = " << (data.permute ? "true" : "false") << '\n';
    os << "\n[model]\n"
       << "kind = " << kind_name(model.kind) << '\n'
       << "hidden_width = " << model.hidden_width << '\n'
       << "hidden_layers = " << model.hidden_layers << '\n'
       << "activation = " << diner::to_string(model.activation.kind) << '\n'
       << "omega0 = " << fmt(model.activation.omega0) << '\n'
       << "table_width = " << model.table_width << '\n'
       << "hash_init = " << (model.hash_init.mode == HashInit::zeros ? "zeros" : "uniform") << '\n'
       << "hash_init_scale = " << fmt(model.hash_init.high) << '\n'
       << "pe_frequencies = " << model.pe_frequencies << '\n';
    os << "\n[train]\n"
       << "epochs = " << train.epochs << '\n'
       << "batch_size = " << train.batch_size << '\n'
       << "lr_net = " << fmt(train.lr_net) << '\n'
       << "lr_hash = " << fmt(train.lr_hash) << '\n'
       << "log_every = " << train.log_every << '\n'
       << "record_time = " << (train.record_time ? "true" : "false") << '\n'
       << "freeze_table = " << (train.freeze_table ? "true" : "false") << '\n';
    os << "\n[disorder]\npermutations = " << permutations << '\n';
    os << "\n[sweep]\nwidths = " << join(widths, size) << '\n';
    os << "\n[spectrum]\n"
       << "bands = " << bands << '\n'
       << "measure = " << (measure == BandMeasure::magnitude ? "magnitude" : "power") << '\n'
       << "resolution = " << extract_resolution << '\n';
    os << "\n[lensless]\n"
       << "measurements = " << lensless.measurements.string() << '\n'
       << "distances = " << join(lensless.distances, [](double v) { return fmt(v); }) << '\n'
       << "wavelength = " << fmt(lensless.wavelength) << '\n'
       << "pixel_pitch = " << fmt(lensless.pixel_pitch) << '\n'
       << "parameterization = " << diner::to_string(lensless.parameterization) << '\n';
    os << "\n[bench]\n"
       << "lengths = " << join(bench.lengths, size) << '\n'
       << "batch = " << bench.batch << '\n'
       << "repeats = " << bench.repeats << '\n';
    return os.str();
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : echo()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::string& text) {
    ptree tree;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
    }
    ExperimentConfig cfg;
    const auto& known = known_keys();
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        // An empty section and a bare key with no value parse alike.
        if (body.empty() && (!body.data().empty() || it == known.end())) {
            throw ConfigError("'" + section + "' is not a known section");
        }
        if (it == known.end()) {
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            if (!it->second.contains(key)) {
                throw ConfigError("unknown key " + where(section, key));
            }
            apply(cfg, section, key, node.get_value<std::string>());
        }
    }
    cfg.apply_seed(cfg.seed);
    validate(cfg);
    check_inputs(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw DataError("cannot open config file " + path.string());
    }
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config(os.str());
}

void validate_config(const ExperimentConfig& cfg) {
    validate(cfg);
}

void check_inputs(const ExperimentConfig& cfg) {
    auto require = [](const std::filesystem::path& p, const char* what) {
        if (!p.empty() && !std::filesystem::exists(p)) {
            throw DataError(std::string(what) + " not found: " + p.string());
        }
    };
    require(cfg.data.input, "[data] input");
    for (const auto& p : cfg.data.inputs) {
        require(p, "[data] inputs entry");
    }
    require(cfg.lensless.measurements, "[lensless] measurements");
}

} // namespace diner::cli
