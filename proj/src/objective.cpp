#include "gca/objective.hpp"

#include "gca/errors.hpp"

namespace gca::obj {

namespace {

ad::Var concat_slices(const std::vector<ad::Var>& slices) {
  return slices.size() == 1 ? slices[0] : ad::concat_cols(slices);
}

}  // namespace

ad::Var reconstruction_nll(ad::Var pred, const Matrix& target) {
  return ad::mse(pred, target);
}

ad::Var kl_structure(const enc::Reconstruction& rec, const StructurePrior& prior) {
  if (!(prior.edge_prior_p > 0.0 && prior.edge_prior_p < 1.0))
    throw ConfigError("kl_structure: prior probability must lie in (0,1)");
  const double inv_n = 1.0 / double(rec.probs[0].rows());
  ad::Var acc;
  for (const auto& probs : rec.probs) {
    ad::Var term = ad::kl_bernoulli_sum(probs, prior.edge_prior_p);
    acc = acc.valid() ? ad::add(acc, term) : term;
  }
  return ad::scale(acc, inv_n);
}

ad::Var discrepancy(const enc::Reconstruction& src, const enc::Reconstruction& tgt) {
  if (src.sample.size() != tgt.sample.size())
    throw ShapeError("discrepancy: lag count mismatch");
  ad::Var s = concat_slices(src.sample);
  ad::Var t = concat_slices(tgt.sample);
  if (s.rows() != t.rows() || s.cols() != t.cols())
    throw ShapeError("discrepancy: paired batches must share shape");
  return ad::abs_mean_diff(ad::stop_grad(s), t);
}

ad::Var sparsity(const enc::Reconstruction& rec) {
  ad::Var flat = concat_slices(rec.sample);  // (n, k·D·D)
  const double inv_n = 1.0 / double(flat.rows());
  ad::Var l1 = ad::l1_sum(flat);
  ad::Var l2 = ad::l2_rows_sum(flat);
  return ad::scale(ad::add(ad::scale(l1, 0.5), ad::scale(l2, 0.5)), inv_n);
}

ad::Var strengthen(ad::Var pred, const Matrix& target, std::size_t dim) {
  return ad::mse_col(pred, target, dim);
}

TotalLossResult total_loss(model::GraphCtx& ctx, GcaModel& model, const Batch& src,
                           const Batch& tgt, const LossWeights& weights,
                           const StructurePrior& prior, const ObjectiveFlags& flags,
                           double tau, Rng& noise_rng,
                           const Batch* tgt_unlabeled) {
  if (src.size() == 0 || tgt.size() == 0) throw DataError("total_loss: empty batch");
  using model::Variant;
  const Variant variant = flags.variant;
  if (flags.target_dim >= model.config().D)
    throw ConfigError("total_loss: target_dim out of range");

  ad::Tape& tape = ctx.tape;

  auto domain_forward = [&](const Batch& batch, data::DomainRole role,
                            enc::Reconstruction& rec_out) {
    rec_out = model.encoder().reconstruct(ctx, batch.history, model.alpha(role), tau,
                                          noise_rng, flags.mode);
    std::vector<ad::Var> lag_vars;
    for (const auto& lag : batch.lags) lag_vars.push_back(tape.input(lag));
    return model.predictor().predict_one_step(ctx, lag_vars, rec_out.sample,
                                              ctx.bind(*model.beta(role)));
  };

  TotalLossResult out;
  out.pred_src = domain_forward(src, data::DomainRole::source, out.rec_src);
  out.pred_tgt = domain_forward(tgt, data::DomainRole::target, out.rec_tgt);

  const bool univariate = variant == Variant::gca_s;
  ad::Var recon_src = univariate ? ad::mse_col(out.pred_src, src.y, flags.target_dim)
                                 : reconstruction_nll(out.pred_src, src.y);
  ad::Var recon_tgt = univariate ? ad::mse_col(out.pred_tgt, tgt.y, flags.target_dim)
                                 : reconstruction_nll(out.pred_tgt, tgt.y);

  if (tgt_unlabeled && flags.use_unlabeled_target && tgt_unlabeled->size() > 0) {
    enc::Reconstruction rec_unl;
    ad::Var pred_unl = domain_forward(*tgt_unlabeled, data::DomainRole::target, rec_unl);
    ad::Var extra = univariate ? ad::mse_col(pred_unl, tgt_unlabeled->y, flags.target_dim)
                               : reconstruction_nll(pred_unl, tgt_unlabeled->y);
    recon_tgt = ad::add(recon_tgt, extra);
  }

  ad::Var kl_src = kl_structure(out.rec_src, prior);
  ad::Var kl_tgt = kl_structure(out.rec_tgt, prior);
  ad::Var disc = discrepancy(out.rec_src, out.rec_tgt);
  ad::Var sp_src = sparsity(out.rec_src);
  ad::Var sp_tgt = sparsity(out.rec_tgt);
  ad::Var str = ad::add(strengthen(out.pred_src, src.y, flags.target_dim),
                        strengthen(out.pred_tgt, tgt.y, flags.target_dim));

  // ablations zero the effective weight; the diagnostic value stays reported
  const double gamma_eff = variant == Variant::gca_r ? 0.0 : weights.gamma;
  const double delta_eff =
      (variant == Variant::gca_e || variant == Variant::gca_s) ? 0.0 : weights.delta;
  const double lambda_eff = weights.lambda;

  ad::Var total = ad::add(ad::add(recon_src, recon_tgt), ad::add(kl_src, kl_tgt));
  if (gamma_eff != 0.0) total = ad::add(total, ad::scale(disc, gamma_eff));
  if (lambda_eff != 0.0)
    total = ad::add(total, ad::scale(ad::add(sp_src, sp_tgt), lambda_eff));
  if (delta_eff != 0.0) total = ad::add(total, ad::scale(str, delta_eff));
  out.total = total;

  LossBreakdown& b = out.breakdown;
  b.recon_src = recon_src.scalar();
  b.recon_tgt = recon_tgt.scalar();
  b.kl_src = kl_src.scalar();
  b.kl_tgt = kl_tgt.scalar();
  b.disc = disc.scalar();
  b.sparsity_src = sp_src.scalar();
  b.sparsity_tgt = sp_tgt.scalar();
  b.strengthen = str.scalar();
  b.total = total.scalar();
  b.gamma = gamma_eff;
  b.lambda = lambda_eff;
  b.delta = delta_eff;
  return out;
}

}  // namespace gca::obj
