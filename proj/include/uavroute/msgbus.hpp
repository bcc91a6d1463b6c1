#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavroute/types.hpp"

namespace uavroute {

class ProtocolViolationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MembershipError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Lockstep broadcast bus for synchronous rounds.
///
/// Every registered agent posts exactly one payload per round; the round
/// completes when the last agent posts, and every agent then sees the same
/// map of payloads keyed (and ordered) by sender. Round r+1 cannot complete
/// before every agent has posted in it, so nobody can observe round r+1
/// before all agents finished round r.
///
/// Two ways to drive it: `broadcast_and_gather` blocks, for one thread per
/// agent; `post` + `collect` let a single-threaded scheduler step agents in
/// UavId order. Both produce identical inboxes.
template <typename Payload>
class RoundBus {
 public:
  using Inbox = std::map<UavId, Payload>;

  explicit RoundBus(const std::vector<UavId>& members) : members_(members.begin(), members.end()) {
    if (members_.empty()) throw MembershipError("bus needs at least one member");
  }

  std::size_t size() const { return members_.size(); }
  const std::set<UavId>& members() const { return members_; }

  std::uint64_t round() const {
    std::lock_guard lock(mu_);
    return round_;
  }

  /// Posts this agent's payload for the current round; returns the round id.
  std::uint64_t post(UavId agent, Payload payload) {
    std::lock_guard lock(mu_);
    return post_locked(agent, std::move(payload));
  }

  /// Inbox of a completed round. Only the most recently completed round is
  /// retained, which is all a lockstep driver needs.
  std::shared_ptr<const Inbox> collect(UavId agent, std::uint64_t round) const {
    std::lock_guard lock(mu_);
    check_member(agent);
    if (!last_ || last_round_ != round) throw ProtocolViolationError("round not complete yet");
    return last_;
  }

  Inbox broadcast_and_gather(UavId agent, Payload payload) {
    std::unique_lock lock(mu_);
    const std::uint64_t r = post_locked(agent, std::move(payload));
    cv_.wait(lock, [&] { return completed_rounds_ > r; });
    // Round r+1 cannot complete while this agent has not posted in it.
    return *last_;
  }

  std::uint64_t completed_rounds() const {
    std::lock_guard lock(mu_);
    return completed_rounds_;
  }

 private:
  void check_member(UavId agent) const {
    if (!members_.count(agent)) throw MembershipError("agent is not registered on the bus");
  }

  std::uint64_t post_locked(UavId agent, Payload payload) {
    check_member(agent);
    if (!pending_.emplace(agent, std::move(payload)).second) {
      throw ProtocolViolationError("agent broadcast twice in one round");
    }
    const std::uint64_t r = round_;
    if (pending_.size() == members_.size()) {
      last_ = std::make_shared<const Inbox>(std::move(pending_));
      pending_.clear();
      last_round_ = r;
      ++round_;
      ++completed_rounds_;
      cv_.notify_all();
    }
    return r;
  }

  std::set<UavId> members_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t round_ = 0;
  std::uint64_t completed_rounds_ = 0;
  Inbox pending_;
  std::shared_ptr<const Inbox> last_;
  std::uint64_t last_round_ = 0;
};

}  // namespace uavroute
