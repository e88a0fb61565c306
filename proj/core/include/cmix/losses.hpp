#ifndef CMIX_LOSSES_HPP
#define CMIX_LOSSES_HPP

#include <span>
#include <utility>

namespace cmix {

enum class LossKind { LeastSquares, Pinball };

// Distance-based loss with a clipping level M and a positive scale. The raw
// losses (scale = 1) drive the optimizers; normalized() picks the scale that
// bounds the loss by 1 on Y x [-M, M] x [-M, M], which is what the
// generalization constants assume.
struct LossSpec {
    LossKind kind = LossKind::LeastSquares;
    double tau = 0.5;         // pinball level, in (0, 1)
    double clip_level = 1.0;  // M > 0
    double scale = 1.0;

    static LossSpec least_squares(double clip_level, double scale = 1.0);
    static LossSpec pinball(double tau, double clip_level, double scale = 1.0);

    // Same loss with scale 1/(2M)^2 (least squares) or 1/(2M) (pinball).
    LossSpec normalized() const;

    void validate() const;
};

// Truncates t to [-M, M].
double clip(double t, double clip_level);

// tau * r for r >= 0, -(1 - tau) * r for r < 0; unscaled.
double pinball_loss(double tau, double r);

// scale * (y - t)^2 or scale * pinball(tau, y - t).
double loss(const LossSpec& spec, double y, double t);

// Checks L(y, clip(t)) <= L(y, t) on every (y, t) sample; requires |y| <= M.
bool clipping_reduces_loss(const LossSpec& spec,
                           std::span<const std::pair<double, double>> yt_samples);

// (1/n) sum L(y_i, pred_i); empty data is a DomainError.
double empirical_risk(const LossSpec& spec, std::span<const double> y,
                      std::span<const double> predictions);

// Lipschitz bound for (x, y) -> L(x, y, f(x)) given sup and Lipschitz bounds
// on f: scale * 2 sqrt(2) (M + ||f||_inf)(1 + |f|_1) for least squares and
// scale * sqrt(2) (1 + |f|_1) for the pinball loss.
double lipschitz_constant(const LossSpec& spec, double f_sup, double f_lip);

}  // namespace cmix

#endif
