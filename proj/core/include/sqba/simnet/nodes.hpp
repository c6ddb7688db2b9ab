#pragma once

#include "sqba/agreement.hpp"
#include "sqba/approver.hpp"
#include "sqba/shared_coin.hpp"
#include "sqba/simnet/network.hpp"
#include "sqba/whp_coin.hpp"

namespace sqba::simnet {

class SharedCoinNode final : public Node {
 public:
  SharedCoinNode(const Registry& reg, ProcessId p, const Parameters& params, InstanceKey key)
      : coin_(reg, reg.key_handle(p), params, key) {}
  void start(std::vector<Message>& out) override { coin_.start(out); }
  void deliver(const Inbound& in, std::vector<Message>& out) override { coin_.deliver(in, out); }
  bool finished() const override { return coin_.output().has_value(); }
  const SharedCoin& coin() const { return coin_; }

 private:
  SharedCoin coin_;
};

class WhpCoinNode final : public Node {
 public:
  WhpCoinNode(const Registry& reg, ProcessId p, const Parameters& params, InstanceKey key)
      : coin_(reg, reg.key_handle(p), params, key) {}
  void start(std::vector<Message>& out) override { coin_.start(out); }
  void deliver(const Inbound& in, std::vector<Message>& out) override { coin_.deliver(in, out); }
  bool finished() const override { return coin_.output().has_value(); }
  const WhpCoin& coin() const { return coin_; }

 private:
  WhpCoin coin_;
};

class ApproverNode final : public Node {
 public:
  ApproverNode(const Registry& reg, ProcessId p, const Parameters& params, InstanceKey key, Value input)
      : approver_(reg, reg.key_handle(p), params, key), input_(input) {}
  void start(std::vector<Message>& out) override { approver_.start(input_, out); }
  void deliver(const Inbound& in, std::vector<Message>& out) override { approver_.deliver(in, out); }
  bool finished() const override { return approver_.result().has_value(); }
  const Approver* approver_for(const InstanceKey& k) const override {
    return k == approver_.key() ? &approver_ : nullptr;
  }
  const Approver& approver() const { return approver_; }

 private:
  Approver approver_;
  Value input_;
};

class AgreementProcess final : public Node {
 public:
  AgreementProcess(const Registry& reg, ProcessId p, const Parameters& params, std::uint64_t instance, int input)
      : node_(reg, reg.key_handle(p), params, instance), input_(input) {}
  void start(std::vector<Message>& out) override { node_.start(input_, out); }
  void deliver(const Inbound& in, std::vector<Message>& out) override { node_.deliver(in, out); }
  bool finished() const override { return node_.decision().has_value(); }
  bool halted() const override { return node_.halted(); }
  const Approver* approver_for(const InstanceKey& k) const override { return node_.approver_for(k); }
  const AgreementNode& agreement() const { return node_; }
  int input() const { return input_; }

 private:
  AgreementNode node_;
  int input_;
};

}  // namespace sqba::simnet
