#include "kge/expressivity.hpp"

#include <fstream>
#include <sstream>

#include "kge/errors.hpp"

namespace kge {

std::size_t GroundTruth::index(int h, int r, int t) const {
    if (h < 0 || h >= num_entities_ || t < 0 || t >= num_entities_ || r < 0 ||
        r >= num_relations_) {
        throw IndexError("ground-truth triple out of range");
    }
    return (static_cast<std::size_t>(r) * num_entities_ + h) * num_entities_ + t;
}

std::size_t GroundTruth::gamma() const {
    std::size_t count = 0;
    for (std::uint8_t v : truth_) count += v;
    return count;
}

std::vector<Triple> GroundTruth::true_triples() const {
    std::vector<Triple> out;
    for (int r = 0; r < num_relations_; ++r)
        for (int h = 0; h < num_entities_; ++h)
            for (int t = 0; t < num_entities_; ++t)
                if (get(h, r, t)) out.push_back({h, r, t});
    return out;
}

GroundTruth GroundTruth::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open ground-truth file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty ground-truth file: " + path);
    std::istringstream header(line);
    int ne, nr;
    if (!(header >> ne >> nr) || ne <= 0 || nr <= 0) {
        throw ParseError("ground-truth header must be `|E| |R|`", 1);
    }
    GroundTruth gt(ne, nr);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        int h, r, t;
        std::string extra;
        if (!(fields >> h >> r >> t) || (fields >> extra)) {
            throw ParseError("expected `h r t`", line_no);
        }
        if (h < 0 || h >= ne || t < 0 || t >= ne || r < 0 || r >= nr) {
            throw ParseError("triple id out of range", line_no);
        }
        gt.set(h, r, t, true);
    }
    return gt;
}

void GroundTruth::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write ground-truth file: " + path);
    out << num_entities_ << ' ' << num_relations_ << '\n';
    for (const Triple& t : true_triples()) {
        out << t.head << ' ' << t.relation << ' ' << t.tail << '\n';
    }
}

ModelParams construct_grid(const GroundTruth& gt) {
    const int ne = gt.num_entities();
    const int nr = gt.num_relations();
    const int dim = ne * nr;

    // Forward vectors per the grid layout; inverse relation vectors stay
    // zero, so the averaged score is half the forward score and the sign
    // separation carries over unchanged.
    ModelParams params = ModelParams::zeros(ModelKind::SimplE, dim, ne, nr);
    for (int e = 0; e < ne; ++e) {
        std::span<double> h = params.head_emb.row(e);
        for (int n = e; n < dim; n += ne) h[n] = 1.0;
    }
    for (int r = 0; r < nr; ++r) {
        std::span<double> v = params.rel_fwd.row(r);
        for (int n = r * ne; n < (r + 1) * ne; ++n) v[n] = 1.0;
    }
    for (int k = 0; k < ne; ++k) {
        std::span<double> t = params.tail_emb.row(k);
        for (int j = 0; j < nr; ++j)
            for (int i = 0; i < ne; ++i) t[j * ne + i] = gt.get(i, j, k) ? 1.0 : -1.0;
    }
    return params;
}

ModelParams construct_incremental(const GroundTruth& gt) {
    const int ne = gt.num_entities();
    const int nr = gt.num_relations();
    const std::vector<Triple> facts = gt.true_triples();

    // d = 1: every entity entry 1, every forward relation entry -1, so all
    // forward scores start at -1. Inverse relation vectors are zero
    // throughout; only the forward half encodes the ground truth.
    std::vector<std::vector<double>> head(ne, std::vector<double>{1.0});
    std::vector<std::vector<double>> tail(ne, std::vector<double>{1.0});
    std::vector<std::vector<double>> rel(nr, std::vector<double>{-1.0});

    for (const Triple& fact : facts) {
        for (auto* group : {&head, &tail, &rel}) {
            for (auto& vec : *group) vec.push_back(0.0);
        }
        // The appended coordinate is nonzero only in this fact's three
        // vectors, so no other triple's score moves.
        double q = trilinear(head[fact.head], rel[fact.relation], tail[fact.tail]);
        head[fact.head].back() = 1.0;
        rel[fact.relation].back() = 1.0;
        tail[fact.tail].back() = 1.0 - q;  // forward score becomes exactly +1
    }

    const int dim = static_cast<int>(facts.size()) + 1;
    ModelParams params = ModelParams::zeros(ModelKind::SimplE, dim, ne, nr);
    for (int e = 0; e < ne; ++e) {
        std::copy(head[e].begin(), head[e].end(), params.head_emb.row(e).begin());
        std::copy(tail[e].begin(), tail[e].end(), params.tail_emb.row(e).begin());
    }
    for (int r = 0; r < nr; ++r) {
        std::copy(rel[r].begin(), rel[r].end(), params.rel_fwd.row(r).begin());
    }
    return params;
}

VerifyResult verify(const ModelParams& params, const GroundTruth& gt,
                    const std::function<double(const ModelParams&, const Triple&)>& scorer) {
    VerifyResult result;
    for (int r = 0; r < gt.num_relations(); ++r) {
        for (int h = 0; h < gt.num_entities(); ++h) {
            for (int t = 0; t < gt.num_entities(); ++t) {
                Triple triple{h, r, t};
                double s = scorer(params, triple);
                bool want_true = gt.get(h, r, t);
                if ((want_true && !(s > 0.0)) || (!want_true && !(s < 0.0))) {
                    result.violations.push_back(triple);
                }
            }
        }
    }
    result.pass = result.violations.empty();
    return result;
}

}  // namespace kge
