#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtpool/clustering.hpp"
#include "rtpool/matrix.hpp"

namespace rtpool {

/// One GIN update: H = MLP((1 + eps) Z + A Z) with a two-affine-map MLP and
/// a rectifier in between. Widths stay f -> h -> f so layers chain.
struct GinLayerParams {
    double epsilon = 0.0;
    Matrix w1;               // f x h
    std::vector<double> b1;  // h
    Matrix w2;               // h x f
    std::vector<double> b2;  // f
};

struct ReadoutParams {
    std::vector<double> w;             // f, the column weight of H^T (H w)
    Matrix classifier_w;               // num_classes x f
    std::vector<double> classifier_b;  // num_classes
};

struct ModelConfig {
    int batch_size = 16;
    int epochs = 500;
    double learning_rate = 0.001;
    int pooling_layers = 2;
    int delta_k = 1;
    double final_dropout = 0.5;
    double weight_decay = 0.0001;
    int hidden_width = 32;
    int num_classes = 2;
    std::uint64_t seed = 1;
    GraphKind graph_kind = GraphKind::Generated;
    bool connect_overlaps = false;
    bool jitter_repair = false;

    int max_order() const { return delta_k * pooling_layers + 1; }
};

/// One GIN layer per pooling level plus one for the input graph.
struct ModelParams {
    std::vector<GinLayerParams> layers;
    ReadoutParams readout;
};

enum class Mode { Train, Eval };

struct Activations {
    std::vector<Matrix> pooled;     // Z per layer (input features for layer 0)
    std::vector<Matrix> pre_mlp;    // (1+eps) Z + A Z
    std::vector<Matrix> hidden;     // rectifier output
    std::vector<Matrix> updated;    // H per layer
    std::vector<double> graph_embedding;  // H^T (H w), before dropout
    std::vector<double> dropped;          // after dropout (equal in eval mode)
    std::vector<std::uint8_t> dropout_mask;
    std::vector<double> logits;
};

struct TrainSample {
    PoolingHierarchy hierarchy;
    Matrix features;  // order-1 vertex count x f
    int label = 0;
};

struct EpochMetrics {
    int epoch = 0;
    double mean_loss = 0.0;
    double train_accuracy = 0.0;
};

ModelParams init_params(int feature_width, int hidden_width, int pooling_layers,
                        int num_classes, std::uint64_t seed);

std::vector<double> flatten(const ModelParams& p);
void unflatten(ModelParams& p, const std::vector<double>& flat);
std::size_t parameter_count(const ModelParams& p);

Matrix gin_forward(const Matrix& adjacency, const Matrix& features, const GinLayerParams& params,
                   Exec exec = Exec::Parallel);

/// Full forward pass: GIN on the input graph, then pool + GIN per layer,
/// bilinear readout, dropout (train mode only, mask derived from
/// seed/step/sample), affine classifier.
Activations rtpool_forward(const PoolingHierarchy& hierarchy, const Matrix& features,
                           const ModelParams& params, Mode mode, double dropout_rate,
                           std::uint64_t dropout_seed, Exec exec = Exec::Parallel);

/// Mean cross-entropy over the batch plus an L2 weight-decay term, with
/// analytic gradients for every parameter. Gradients accumulate in sample
/// index order regardless of thread count.
double loss_and_grad(const std::vector<const TrainSample*>& batch, const ModelParams& params,
                     const ModelConfig& config, std::uint64_t step, ModelParams& grad,
                     Exec exec = Exec::Parallel);

std::vector<EpochMetrics> train(std::vector<TrainSample>& samples, ModelParams& params,
                                const ModelConfig& config, Exec exec = Exec::Parallel);

double evaluate(const std::vector<TrainSample>& samples, const ModelParams& params,
                Exec exec = Exec::Parallel);

}  // namespace rtpool
