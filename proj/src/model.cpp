#include "rtpool/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "rtpool/rng.hpp"

namespace rtpool {

namespace {

void check_finite(const Matrix& m, const char* where) {
    for (double v : m.data())
        if (!std::isfinite(v)) throw NonFiniteActivation(std::string("non-finite value in ") + where);
}

Matrix affine(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    Matrix y = matmul(x, w, Exec::Serial);
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) y(i, j) += b[j];
    return y;
}

Matrix relu(const Matrix& x) {
    Matrix y = x;
    for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
    return y;
}

/// (1 + eps) Z + A Z.
Matrix gin_aggregate(const Matrix& adjacency, const Matrix& z, double epsilon, Exec exec) {
    if (adjacency.rows() != adjacency.cols() || adjacency.rows() != z.rows())
        throw ShapeMismatch("gin aggregation: adjacency " + std::to_string(adjacency.rows()) + "x" +
                            std::to_string(adjacency.cols()) + " vs features " +
                            std::to_string(z.rows()) + " rows");
    Matrix s = matmul(adjacency, z, exec);
    const double self = 1.0 + epsilon;
    for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j) s(i, j) += self * z(i, j);
    return s;
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    std::vector<double> out(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

void fill_uniform(Rng& rng, double bound, std::vector<double>& v) {
    for (double& x : v) x = rng.next_in(-bound, bound);
}

void fill_uniform(Rng& rng, double bound, Matrix& m) {
    for (double& x : m.data()) x = rng.next_in(-bound, bound);
}

struct SampleGrad {
    double loss = 0.0;
    std::vector<double> grad;  // flat, same layout as flatten()
};

}  // namespace

ModelParams init_params(int feature_width, int hidden_width, int pooling_layers, int num_classes,
                        std::uint64_t seed) {
    Rng rng(splitmix64(seed));
    ModelParams p;
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(feature_width));
    const double hid_bound = 1.0 / std::sqrt(static_cast<double>(hidden_width));
    for (int l = 0; l <= pooling_layers; ++l) {
        GinLayerParams layer;
        layer.epsilon = 0.0;
        layer.w1 = Matrix(feature_width, hidden_width);
        layer.b1.assign(hidden_width, 0.0);
        layer.w2 = Matrix(hidden_width, feature_width);
        layer.b2.assign(feature_width, 0.0);
        fill_uniform(rng, in_bound, layer.w1);
        fill_uniform(rng, in_bound, layer.b1);
        fill_uniform(rng, hid_bound, layer.w2);
        fill_uniform(rng, hid_bound, layer.b2);
        p.layers.push_back(std::move(layer));
    }
    p.readout.w.assign(feature_width, 0.0);
    fill_uniform(rng, in_bound, p.readout.w);
    p.readout.classifier_w = Matrix(num_classes, feature_width);
    p.readout.classifier_b.assign(num_classes, 0.0);
    fill_uniform(rng, in_bound, p.readout.classifier_w);
    fill_uniform(rng, in_bound, p.readout.classifier_b);
    return p;
}

std::vector<double> flatten(const ModelParams& p) {
    std::vector<double> out;
    for (const auto& l : p.layers) {
        out.push_back(l.epsilon);
        out.insert(out.end(), l.w1.data().begin(), l.w1.data().end());
        out.insert(out.end(), l.b1.begin(), l.b1.end());
        out.insert(out.end(), l.w2.data().begin(), l.w2.data().end());
        out.insert(out.end(), l.b2.begin(), l.b2.end());
    }
    out.insert(out.end(), p.readout.w.begin(), p.readout.w.end());
    out.insert(out.end(), p.readout.classifier_w.data().begin(), p.readout.classifier_w.data().end());
    out.insert(out.end(), p.readout.classifier_b.begin(), p.readout.classifier_b.end());
    return out;
}

void unflatten(ModelParams& p, const std::vector<double>& flat) {
    std::size_t i = 0;
    auto take = [&](double* dst, std::size_t n) {
        std::copy(flat.begin() + i, flat.begin() + i + n, dst);
        i += n;
    };
    for (auto& l : p.layers) {
        l.epsilon = flat[i++];
        take(l.w1.data().data(), l.w1.data().size());
        take(l.b1.data(), l.b1.size());
        take(l.w2.data().data(), l.w2.data().size());
        take(l.b2.data(), l.b2.size());
    }
    take(p.readout.w.data(), p.readout.w.size());
    take(p.readout.classifier_w.data().data(), p.readout.classifier_w.data().size());
    take(p.readout.classifier_b.data(), p.readout.classifier_b.size());
    if (i != flat.size()) throw ShapeMismatch("unflatten: length mismatch");
}

std::size_t parameter_count(const ModelParams& p) { return flatten(p).size(); }

Matrix gin_forward(const Matrix& adjacency, const Matrix& features, const GinLayerParams& params,
                   Exec exec) {
    Matrix s = gin_aggregate(adjacency, features, params.epsilon, exec);
    Matrix h = relu(affine(s, params.w1, params.b1));
    Matrix out = affine(h, params.w2, params.b2);
    check_finite(out, "gin_forward");
    return out;
}

Activations rtpool_forward(const PoolingHierarchy& hierarchy, const Matrix& features,
                           const ModelParams& params, Mode mode, double dropout_rate,
                           std::uint64_t dropout_seed, Exec exec) {
    const std::size_t layer_count = hierarchy.matrices.size() + 1;
    if (params.layers.size() != layer_count)
        throw ShapeMismatch("rtpool_forward: " + std::to_string(params.layers.size()) +
                            " GIN layers for " + std::to_string(layer_count) + " levels");
    if (features.rows() != hierarchy.input_graph.adjacency.rows())
        throw ShapeMismatch("rtpool_forward: feature rows do not match the input graph");

    Activations act;
    Matrix x = features;
    for (std::size_t l = 0; l < layer_count; ++l) {
        if (l > 0) x = pool_features(hierarchy.matrices[l - 1], x, exec);
        const Matrix& adj =
            (l == 0) ? hierarchy.input_graph.adjacency : hierarchy.graphs[l - 1].adjacency;
        act.pooled.push_back(x);
        Matrix s = gin_aggregate(adj, x, params.layers[l].epsilon, exec);
        act.pre_mlp.push_back(s);
        Matrix h = relu(affine(s, params.layers[l].w1, params.layers[l].b1));
        act.hidden.push_back(h);
        x = affine(h, params.layers[l].w2, params.layers[l].b2);
        check_finite(x, "rtpool_forward layer");
        act.updated.push_back(x);
    }

    // Readout H^T (H w): one embedding entry per feature channel.
    const int f = features.cols();
    std::vector<double> hw(x.rows(), 0.0);
    for (int v = 0; v < x.rows(); ++v) {
        double acc = 0.0;
        for (int j = 0; j < f; ++j) acc += x(v, j) * params.readout.w[j];
        hw[v] = acc;
    }
    act.graph_embedding.assign(f, 0.0);
    for (int j = 0; j < f; ++j) {
        double acc = 0.0;
        for (int v = 0; v < x.rows(); ++v) acc += x(v, j) * hw[v];
        act.graph_embedding[j] = acc;
    }

    act.dropped = act.graph_embedding;
    act.dropout_mask.assign(f, 1);
    if (mode == Mode::Train && dropout_rate > 0.0) {
        const double keep_scale = 1.0 / (1.0 - dropout_rate);
        for (int j = 0; j < f; ++j) {
            double u = to_unit_double(splitmix64(hash_mix(dropout_seed, static_cast<std::uint64_t>(j))));
            if (u < dropout_rate) {
                act.dropout_mask[j] = 0;
                act.dropped[j] = 0.0;
            } else {
                act.dropped[j] *= keep_scale;
            }
        }
    }

    act.logits = matvec(params.readout.classifier_w, act.dropped);
    for (std::size_t c = 0; c < act.logits.size(); ++c)
        act.logits[c] += params.readout.classifier_b[c];
    for (double v : act.logits)
        if (!std::isfinite(v)) throw NonFiniteActivation("non-finite logit");
    return act;
}

namespace {

/// Cross-entropy backward pass through the cached forward state; writes the
/// per-sample gradient in flatten() layout.
SampleGrad backward_sample(const TrainSample& sample, const ModelParams& params,
                           const ModelConfig& config, std::uint64_t dropout_seed, Mode mode,
                           Exec exec) {
    Activations act = rtpool_forward(sample.hierarchy, sample.features, params, mode,
                                     config.final_dropout, dropout_seed, exec);
    const int classes = static_cast<int>(act.logits.size());
    if (sample.label < 0 || sample.label >= classes)
        throw InvariantViolation("label " + std::to_string(sample.label) + " outside 0.." +
                                 std::to_string(classes - 1));

    // Softmax cross-entropy.
    double mx = *std::max_element(act.logits.begin(), act.logits.end());
    double sum = 0.0;
    for (double v : act.logits) sum += std::exp(v - mx);
    const double log_norm = mx + std::log(sum);
    SampleGrad out;
    out.loss = log_norm - act.logits[sample.label];
    if (!std::isfinite(out.loss)) throw NonFiniteLoss("non-finite sample loss");

    std::vector<double> dlogits(classes);
    for (int c = 0; c < classes; ++c)
        dlogits[c] = std::exp(act.logits[c] - log_norm) - (c == sample.label ? 1.0 : 0.0);

    ModelParams g;
    g.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        g.layers[l].w1 = Matrix(params.layers[l].w1.rows(), params.layers[l].w1.cols());
        g.layers[l].b1.assign(params.layers[l].b1.size(), 0.0);
        g.layers[l].w2 = Matrix(params.layers[l].w2.rows(), params.layers[l].w2.cols());
        g.layers[l].b2.assign(params.layers[l].b2.size(), 0.0);
    }
    const int f = sample.features.cols();
    g.readout.w.assign(f, 0.0);
    g.readout.classifier_w = Matrix(classes, f);
    g.readout.classifier_b.assign(classes, 0.0);

    // Classifier and dropout.
    std::vector<double> ddropped(f, 0.0);
    for (int c = 0; c < classes; ++c) {
        g.readout.classifier_b[c] = dlogits[c];
        for (int j = 0; j < f; ++j) {
            g.readout.classifier_w(c, j) = dlogits[c] * act.dropped[j];
            ddropped[j] += params.readout.classifier_w(c, j) * dlogits[c];
        }
    }
    std::vector<double> dembed(f, 0.0);
    const bool dropped_out = (mode == Mode::Train && config.final_dropout > 0.0);
    const double keep_scale = dropped_out ? 1.0 / (1.0 - config.final_dropout) : 1.0;
    for (int j = 0; j < f; ++j)
        dembed[j] = act.dropout_mask[j] ? ddropped[j] * keep_scale : 0.0;

    // Readout bilinear form: embedding = H^T (H w).
    const Matrix& hl = act.updated.back();
    std::vector<double> hw(hl.rows(), 0.0);
    for (int v = 0; v < hl.rows(); ++v) {
        double acc = 0.0;
        for (int j = 0; j < f; ++j) acc += hl(v, j) * params.readout.w[j];
        hw[v] = acc;
    }
    std::vector<double> hg(hl.rows(), 0.0);  // H g
    for (int v = 0; v < hl.rows(); ++v) {
        double acc = 0.0;
        for (int j = 0; j < f; ++j) acc += hl(v, j) * dembed[j];
        hg[v] = acc;
    }
    for (int j = 0; j < f; ++j) {
        double acc = 0.0;
        for (int v = 0; v < hl.rows(); ++v) acc += hl(v, j) * hg[v];
        g.readout.w[j] = acc;
    }
    Matrix dx(hl.rows(), f);
    for (int v = 0; v < hl.rows(); ++v)
        for (int j = 0; j < f; ++j)
            dx(v, j) = hw[v] * dembed[j] + hg[v] * params.readout.w[j];

    // GIN layers, last to first.
    for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
        const GinLayerParams& lp = params.layers[l];
        const Matrix& s = act.pre_mlp[l];
        const Matrix& hid = act.hidden[l];
        const Matrix& z = act.pooled[l];
        const Matrix& adj =
            (l == 0) ? sample.hierarchy.input_graph.adjacency
                     : sample.hierarchy.graphs[l - 1].adjacency;

        // out = hidden * w2 + b2
        for (int j = 0; j < f; ++j) {
            double acc = 0.0;
            for (int v = 0; v < dx.rows(); ++v) acc += dx(v, j);
            g.layers[l].b2[j] = acc;
        }
        g.layers[l].w2 = matmul(transpose(hid), dx, Exec::Serial);
        Matrix dhid = matmul(dx, transpose(lp.w2), Exec::Serial);

        // hidden = relu(s * w1 + b1); use the hidden activations as the gate.
        Matrix du = dhid;
        for (int v = 0; v < du.rows(); ++v)
            for (int j = 0; j < du.cols(); ++j)
                if (hid(v, j) <= 0.0) du(v, j) = 0.0;
        for (int j = 0; j < du.cols(); ++j) {
            double acc = 0.0;
            for (int v = 0; v < du.rows(); ++v) acc += du(v, j);
            g.layers[l].b1[j] = acc;
        }
        g.layers[l].w1 = matmul(transpose(s), du, Exec::Serial);
        Matrix ds = matmul(du, transpose(lp.w1), Exec::Serial);

        // s = (1 + eps) z + A z
        double deps = 0.0;
        for (int v = 0; v < ds.rows(); ++v)
            for (int j = 0; j < ds.cols(); ++j) deps += ds(v, j) * z(v, j);
        g.layers[l].epsilon = deps;

        Matrix dz = matmul(adj, ds, Exec::Serial);  // adjacency is symmetric
        const double self = 1.0 + lp.epsilon;
        for (int v = 0; v < dz.rows(); ++v)
            for (int j = 0; j < dz.cols(); ++j) dz(v, j) += self * ds(v, j);

        if (l > 0) {
            // z = C_hat * x, constants: push through the transpose.
            dx = matmul(transpose(sample.hierarchy.matrices[l - 1].weights), dz, Exec::Serial);
        }
    }

    out.grad = flatten(g);
    return out;
}

}  // namespace

double loss_and_grad(const std::vector<const TrainSample*>& batch, const ModelParams& params,
                     const ModelConfig& config, std::uint64_t step, ModelParams& grad,
                     Exec exec) {
    if (batch.empty()) throw EmptyDataset("loss_and_grad: empty batch");

    std::vector<SampleGrad> parts(batch.size());
    auto body = [&](std::size_t i) {
        std::uint64_t dropout_seed = hash_mix(config.seed, step, static_cast<std::uint64_t>(i));
        parts[i] = backward_sample(*batch[i], params, config, dropout_seed, Mode::Train,
                                   Exec::Serial);
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch.size()); ++i) {
            try {
                body(i);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
#else
        for (std::size_t i = 0; i < batch.size(); ++i) body(i);
#endif
    } else {
        for (std::size_t i = 0; i < batch.size(); ++i) body(i);
    }

    // Reduce in sample order so results do not depend on thread count.
    const double inv = 1.0 / static_cast<double>(batch.size());
    std::vector<double> theta = flatten(params);
    std::vector<double> acc(theta.size(), 0.0);
    double loss = 0.0;
    for (const SampleGrad& part : parts) {
        loss += part.loss * inv;
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += part.grad[j] * inv;
    }
    for (std::size_t j = 0; j < acc.size(); ++j) {
        loss += 0.5 * config.weight_decay * theta[j] * theta[j] / static_cast<double>(theta.size()) *
                static_cast<double>(theta.size());
        acc[j] += config.weight_decay * theta[j];
    }
    if (!std::isfinite(loss)) throw NonFiniteLoss("non-finite batch loss");

    grad = params;
    unflatten(grad, acc);
    return loss;
}

std::vector<EpochMetrics> train(std::vector<TrainSample>& samples, ModelParams& params,
                                const ModelConfig& config, Exec exec) {
    if (samples.empty()) throw EmptyDataset("train: empty dataset");
    std::vector<EpochMetrics> metrics;
    Rng shuffle_rng(splitmix64(hash_mix(config.seed, 0x5hu)));
    std::vector<int> order(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) order[i] = static_cast<int>(i);

    std::vector<double> theta = flatten(params);
    std::uint64_t step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::vector<const TrainSample*> batch;
            for (std::size_t i = start; i < order.size() && i < start + config.batch_size; ++i)
                batch.push_back(&samples[order[i]]);
            ModelParams grad;
            loss_sum += loss_and_grad(batch, params, config, step, grad, exec);
            ++batches;
            ++step;
            std::vector<double> g = flatten(grad);
            for (std::size_t j = 0; j < theta.size(); ++j)
                theta[j] -= config.learning_rate * g[j];
            unflatten(params, theta);
        }
        EpochMetrics em;
        em.epoch = epoch;
        em.mean_loss = loss_sum / std::max(1, batches);
        em.train_accuracy = evaluate(samples, params, exec);
        metrics.push_back(em);
    }
    return metrics;
}

double evaluate(const std::vector<TrainSample>& samples, const ModelParams& params, Exec exec) {
    if (samples.empty()) throw EmptyDataset("evaluate: empty dataset");
    std::vector<std::uint8_t> correct(samples.size(), 0);
    auto body = [&](std::size_t i) {
        Activations act = rtpool_forward(samples[i].hierarchy, samples[i].features, params,
                                         Mode::Eval, 0.0, 0, Exec::Serial);
        int best = 0;
        for (std::size_t c = 1; c < act.logits.size(); ++c)
            if (act.logits[c] > act.logits[best]) best = static_cast<int>(c);
        correct[i] = (best == samples[i].label) ? 1 : 0;
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(samples.size()); ++i) {
            try {
                body(i);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
#else
        for (std::size_t i = 0; i < samples.size(); ++i) body(i);
#endif
    } else {
        for (std::size_t i = 0; i < samples.size(); ++i) body(i);
    }
    double sum = 0.0;
    for (auto c : correct) sum += c;
    return sum / static_cast<double>(samples.size());
}

}  // namespace rtpool
