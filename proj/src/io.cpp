#include "relumip/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relumip {

namespace {

// Exact decimal round-trip for doubles.
std::string fmt(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Whitespace tokenizer that remembers line numbers for error messages.
class TokenReader {
public:
    TokenReader(std::istream& in, std::string origin)
        : in_(in), origin_(std::move(origin))
    {
    }

    std::string next(const char* what)
    {
        std::string tok;
        while (true) {
            int c = in_.get();
            if (c == EOF) {
                if (tok.empty())
                    fail(std::string("unexpected end of file, expected ") + what);
                return tok;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) {
                    if (c == '\n')
                        in_.unget();
                    return tok;
                }
                if (c == '\n')
                    ++line_;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
    }

    double next_double(const char* what)
    {
        std::string tok = next(what);
        try {
            size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail("expected a number for " + std::string(what) + ", got '" + tok + "'");
        }
        return 0;
    }

    int next_int(const char* what)
    {
        double v = next_double(what);
        if (v != std::floor(v))
            fail(std::string(what) + " must be an integer");
        return static_cast<int>(v);
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw std::runtime_error(origin_ + ":" + std::to_string(line_) + ": " + msg);
    }

private:
    std::istream& in_;
    std::string origin_;
    int line_ = 1;
};

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    return out;
}

const char* tag_name(BoundProvenance p)
{
    switch (p) {
        case BoundProvenance::Interval: return "interval";
        case BoundProvenance::LpTightened: return "lp";
        case BoundProvenance::TimeLimitEstimate: return "timelimit";
    }
    return "?";
}

BoundProvenance parse_tag(TokenReader& r, const std::string& tok)
{
    if (tok == "interval")
        return BoundProvenance::Interval;
    if (tok == "lp")
        return BoundProvenance::LpTightened;
    if (tok == "timelimit")
        return BoundProvenance::TimeLimitEstimate;
    r.fail("unknown provenance tag '" + tok + "'");
}

}  // namespace

Network load_network(const std::string& path)
{
    std::ifstream in = open_in(path);
    TokenReader r(in, path);

    if (r.next("format tag") != "relunet")
        r.fail("not a relunet file");
    int version = r.next_int("format version");
    if (version != 1)
        r.fail("unsupported relunet version " + std::to_string(version));

    Network net;
    if (r.next("'input'") != "input")
        r.fail("expected 'input'");
    net.input_dim = r.next_int("input dimension");
    if (net.input_dim <= 0)
        r.fail("input dimension must be positive");

    if (r.next("'box'") != "box")
        r.fail("expected 'box'");
    net.input_lb.resize(net.input_dim);
    net.input_ub.resize(net.input_dim);
    for (int j = 0; j < net.input_dim; ++j) {
        net.input_lb[j] = r.next_double("box lower bound");
        net.input_ub[j] = r.next_double("box upper bound");
    }

    if (r.next("'layers'") != "layers")
        r.fail("expected 'layers'");
    int nlayers = r.next_int("layer count");

    int prev = net.input_dim;
    for (int k = 1; k <= nlayers; ++k) {
        std::string kind = r.next("layer kind");
        if (kind == "dense") {
            int out = r.next_int("output count");
            int in_dim = r.next_int("input count");
            if (in_dim != prev)
                r.fail("layer " + std::to_string(k) + ": declares " +
                       std::to_string(in_dim) + " inputs but previous layer provides " +
                       std::to_string(prev));
            std::string act = r.next("activation");
            if (act != "relu" && act != "linear")
                r.fail("layer " + std::to_string(k) + ": unknown activation '" + act + "'");
            if (r.next("'weights'") != "weights")
                r.fail("expected 'weights'");
            std::vector<std::vector<double>> w(out, std::vector<double>(in_dim));
            for (int j = 0; j < out; ++j)
                for (int i = 0; i < in_dim; ++i)
                    w[j][i] = r.next_double("weight");
            if (r.next("'bias'") != "bias")
                r.fail("expected 'bias'");
            std::vector<double> b(out);
            for (int j = 0; j < out; ++j)
                b[j] = r.next_double("bias");
            net.layers.push_back(Layer::dense(
                std::move(w), std::move(b),
                act == "relu" ? Activation::ReLU : Activation::Linear));
            prev = out;
        } else if (kind == "avgpool" || kind == "maxpool") {
            int out = r.next_int("output count");
            std::vector<std::vector<int>> groups(out);
            for (int j = 0; j < out; ++j) {
                if (r.next("'group'") != "group")
                    r.fail("expected 'group'");
                int t = r.next_int("group size");
                if (t <= 0)
                    r.fail("group size must be positive");
                groups[j].resize(t);
                for (int i = 0; i < t; ++i)
                    groups[j][i] = r.next_int("group index");
            }
            net.layers.push_back(kind == "avgpool" ? Layer::avg_pool(std::move(groups))
                                                   : Layer::max_pool(std::move(groups)));
            prev = out;
        } else {
            r.fail("unknown layer kind '" + kind + "'");
        }
    }

    ValidationReport report = validate_network(net);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << path << ": network fails validation:";
        for (const auto& f : report.findings)
            msg << "\n  " << f.message;
        throw std::runtime_error(msg.str());
    }
    return net;
}

void save_network(const Network& net, const std::string& path)
{
    std::ofstream out = open_out(path);
    out << "relunet 1\n";
    out << "input " << net.input_dim << "\n";
    out << "box\n";
    for (int j = 0; j < net.input_dim; ++j)
        out << fmt(net.input_lb[j]) << ' ' << fmt(net.input_ub[j]) << "\n";
    out << "layers " << net.num_layers() << "\n";
    int prev = net.input_dim;
    for (const Layer& l : net.layers) {
        if (l.kind == LayerKind::Dense) {
            out << "dense " << l.output_size() << ' ' << prev << ' '
                << (l.activation == Activation::ReLU ? "relu" : "linear") << "\n";
            out << "weights\n";
            for (const auto& row : l.weights) {
                for (size_t i = 0; i < row.size(); ++i)
                    out << (i ? " " : "") << fmt(row[i]);
                out << "\n";
            }
            out << "bias\n";
            for (size_t j = 0; j < l.bias.size(); ++j)
                out << (j ? " " : "") << fmt(l.bias[j]);
            out << "\n";
        } else {
            out << (l.kind == LayerKind::AvgPool ? "avgpool " : "maxpool ")
                << l.output_size() << "\n";
            for (const auto& g : l.groups) {
                out << "group " << g.size();
                for (int idx : g)
                    out << ' ' << idx;
                out << "\n";
            }
        }
        prev = l.output_size();
    }
}

void save_bounds(const BoundsTable& table, const Network& net, const std::string& path)
{
    std::ofstream out = open_out(path);
    out << "relubounds 1\n";
    out << "fingerprint " << net.shape_fingerprint() << "\n";
    out << "box\n";
    for (size_t j = 0; j < table.input_lb.size(); ++j)
        out << fmt(table.input_lb[j]) << ' ' << fmt(table.input_ub[j]) << "\n";
    for (size_t k = 0; k < table.units.size(); ++k) {
        out << "layer " << k + 1 << ' ' << table.units[k].size() << "\n";
        for (size_t j = 0; j < table.units[k].size(); ++j) {
            const UnitBounds& u = table.units[k][j];
            out << j << ' ' << fmt(u.ub_x) << ' ' << fmt(u.ub_s) << ' '
                << tag_name(u.tag_x) << ' ' << tag_name(u.tag_s) << "\n";
        }
    }
}

BoundsTable load_bounds(const std::string& path, const Network& net)
{
    std::ifstream in = open_in(path);
    TokenReader r(in, path);

    if (r.next("format tag") != "relubounds")
        r.fail("not a relubounds file");
    int version = r.next_int("format version");
    if (version != 1)
        r.fail("unsupported relubounds version " + std::to_string(version));

    if (r.next("'fingerprint'") != "fingerprint")
        r.fail("expected 'fingerprint'");
    std::string fp = r.next("fingerprint value");
    if (fp != net.shape_fingerprint())
        r.fail("bounds were computed for network shape " + fp + ", this network is " +
               net.shape_fingerprint());

    BoundsTable table;
    if (r.next("'box'") != "box")
        r.fail("expected 'box'");
    table.input_lb.resize(net.input_dim);
    table.input_ub.resize(net.input_dim);
    for (int j = 0; j < net.input_dim; ++j) {
        table.input_lb[j] = r.next_double("box lower bound");
        table.input_ub[j] = r.next_double("box upper bound");
        if (table.input_lb[j] != net.input_lb[j] || table.input_ub[j] != net.input_ub[j])
            r.fail("bounds were computed for a different input box (entry " +
                   std::to_string(j) + ")");
    }

    table.units.resize(net.num_layers());
    for (int k = 1; k <= net.num_layers(); ++k) {
        if (r.next("'layer'") != "layer")
            r.fail("expected 'layer'");
        int kk = r.next_int("layer index");
        int count = r.next_int("unit count");
        if (kk != k || count != net.layer_output_size(k))
            r.fail("layer record " + std::to_string(kk) + " does not match the network");
        table.units[k - 1].resize(count);
        for (int j = 0; j < count; ++j) {
            int jj = r.next_int("unit index");
            if (jj != j)
                r.fail("unit records out of order in layer " + std::to_string(k));
            UnitBounds& u = table.units[k - 1][j];
            u.ub_x = r.next_double("ub_x");
            u.ub_s = r.next_double("ub_s");
            u.tag_x = parse_tag(r, r.next("x provenance tag"));
            u.tag_s = parse_tag(r, r.next("s provenance tag"));
        }
    }
    return table;
}

void write_image(const std::vector<double>& values, int width, int height,
                 const std::string& path)
{
    if (width <= 0 || height <= 0 ||
        static_cast<size_t>(width) * height != values.size())
        throw std::invalid_argument("write_image: " + std::to_string(values.size()) +
                                    " values do not fill " + std::to_string(width) + "x" +
                                    std::to_string(height));
    std::ofstream out = open_out(path);
    out << "P2\n" << width << ' ' << height << "\n255\n";
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = std::clamp(values[static_cast<size_t>(y) * width + x], 0.0, 1.0);
            out << (x ? " " : "") << std::lround(255.0 * v);
        }
        out << "\n";
    }
}

GrayImage read_image(const std::string& path)
{
    std::ifstream in = open_in(path);
    TokenReader r(in, path);
    if (r.next("magic") != "P2")
        r.fail("only ASCII portable graymaps (P2) are supported");
    GrayImage img;
    img.width = r.next_int("width");
    img.height = r.next_int("height");
    int maxval = r.next_int("maxval");
    if (img.width <= 0 || img.height <= 0 || maxval <= 0)
        r.fail("invalid graymap header");
    img.values.resize(static_cast<size_t>(img.width) * img.height);
    for (double& v : img.values)
        v = r.next_double("pixel") / maxval;
    return img;
}

GrayImage read_input_vector(const std::string& path)
{
    {
        std::ifstream probe = open_in(path);
        std::string first;
        probe >> first;
        if (first == "P2")
            return read_image(path);
    }
    std::ifstream in = open_in(path);
    GrayImage img;
    double v;
    while (in >> v)
        img.values.push_back(v);
    if (!in.eof())
        throw std::runtime_error(path + ": trailing non-numeric content");
    if (img.values.empty())
        throw std::runtime_error(path + ": no values found");
    img.width = static_cast<int>(img.values.size());
    img.height = 1;
    return img;
}

void write_report(const MilpResult& result, const SolverConfig& config,
                  const std::optional<ReportAdversarialMeta>& adversarial,
                  const std::string& path)
{
    std::ofstream out = open_out(path);
    out << "milp_report 1\n";
    out << "status " << to_string(result.status) << "\n";
    if (result.has_incumbent())
        out << "objective " << fmt(result.objective) << "\n";
    out << "dual_bound " << fmt(result.dual_bound) << "\n";
    out << "pct_gap " << fmt(result.stats.pct_gap) << "\n";
    out << "nodes " << result.stats.nodes << "\n";
    out << "time_s " << fmt(result.stats.wall_time_s) << "\n";
    out << "config.time_limit_s " << fmt(config.time_limit_s) << "\n";
    out << "config.rel_gap_target " << fmt(config.rel_gap_target) << "\n";
    out << "config.integrality_tol " << fmt(config.integrality_tol) << "\n";
    out << "improvements " << result.log.size() << "\n";
    for (const ImprovementRecord& rec : result.log)
        out << "improvement " << fmt(rec.time_s) << ' ' << rec.nodes << ' '
            << fmt(rec.objective) << ' ' << fmt(rec.bound) << "\n";

    if (adversarial) {
        const AdversarialSpec& spec = adversarial->spec;
        const AdvVerification& v = adversarial->verification;
        out << "adversarial.true_label " << spec.true_label << "\n";
        out << "adversarial.target_label " << spec.target << "\n";
        out << "adversarial.margin_factor " << fmt(spec.margin_factor) << "\n";
        if (spec.pixel_cap)
            out << "adversarial.pixel_cap " << fmt(*spec.pixel_cap) << "\n";
        out << "adversarial.achieved_label " << v.achieved_label << "\n";
        out << "adversarial.margin_ok " << (v.margin_ok ? 1 : 0) << "\n";
        out << "adversarial.l1_distance " << fmt(v.l1_distance) << "\n";
        out << "adversarial.linf_distance " << fmt(v.linf_distance) << "\n";
        out << "adversarial.cap_ok " << (v.cap_ok ? 1 : 0) << "\n";
        out << "adversarial.box_ok " << (v.box_ok ? 1 : 0) << "\n";
    }
    if (!out)
        throw std::runtime_error("failed while writing " + path);
}

}  // namespace relumip
