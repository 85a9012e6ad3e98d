#pragma once

// Price-time-priority limit order book on a discrete log-price grid.
//
// Prices live on an integer tick grid directly in log space (tick = 0.01 log
// units), so quote arithmetic is exact. Every order has unit size; a crossing
// order therefore executes against exactly the single best opposite order
// and never rests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

namespace mmf {

inline constexpr double kTickSize = 0.01;  // log-price units per tick

enum class Side : std::uint8_t { buy, sell };

inline Side opposite(Side side) noexcept {
    return side == Side::buy ? Side::sell : Side::buy;
}

inline double ticks_to_log_price(std::int64_t ticks) noexcept {
    return static_cast<double>(ticks) * kTickSize;
}

// Nearest tick, ties away from zero.
inline std::int64_t log_price_to_ticks(double log_price) noexcept {
    return std::llround(log_price / kTickSize);
}

struct Order {
    std::uint64_t id = 0;
    Side side = Side::buy;
    std::int64_t price_ticks = 0;
    std::uint64_t entry_time = 0;
    // Distance in ticks to the opposite best at entry; never mutated. When
    // the opposite side was empty at entry the distance is undefined.
    std::int64_t initial_distance = 0;
    bool initial_distance_defined = false;
    // Book-internal: position in the side's random-access id vector.
    std::size_t side_slot = 0;
};

struct PlacementOutcome {
    enum class Kind : std::uint8_t { rested, executed };
    Kind kind = Kind::rested;
    std::uint64_t order_id = 0;        // valid when rested
    std::int64_t trade_price_ticks = 0;  // valid when executed

    bool rested() const noexcept { return kind == Kind::rested; }
    bool executed() const noexcept { return kind == Kind::executed; }
};

class OrderBook {
  public:
    PlacementOutcome place(Side side, std::int64_t price_ticks, std::uint64_t now) {
        if (side == Side::buy) {
            if (const auto ask = best_ask(); ask && price_ticks >= *ask) {
                return execute_best(Side::sell);
            }
        } else {
            if (const auto bid = best_bid(); bid && price_ticks <= *bid) {
                return execute_best(Side::buy);
            }
        }

        Order order;
        order.id = next_id_++;
        order.side = side;
        order.price_ticks = price_ticks;
        order.entry_time = now;
        const auto opp = side == Side::buy ? best_ask() : best_bid();
        if (opp) {
            order.initial_distance = std::abs(price_ticks - *opp);
            order.initial_distance_defined = true;
        }

        if (side == Side::buy) {
            bids_[price_ticks].push_back(order.id);
            order.side_slot = bid_ids_.size();
            bid_ids_.push_back(order.id);
            ++n_buy_;
        } else {
            asks_[price_ticks].push_back(order.id);
            order.side_slot = ask_ids_.size();
            ask_ids_.push_back(order.id);
            ++n_sell_;
        }
        orders_.emplace(order.id, order);
        ++placed_;

        PlacementOutcome outcome;
        outcome.kind = PlacementOutcome::Kind::rested;
        outcome.order_id = order.id;
        return outcome;
    }

    bool cancel(std::uint64_t order_id) {
        const auto it = orders_.find(order_id);
        if (it == orders_.end()) return false;
        remove_from_level(it->second);
        orders_.erase(it);
        ++cancelled_;
        return true;
    }

    std::optional<std::int64_t> best_bid() const {
        if (bids_.empty()) return std::nullopt;
        return bids_.begin()->first;
    }

    std::optional<std::int64_t> best_ask() const {
        if (asks_.empty()) return std::nullopt;
        return asks_.begin()->first;
    }

    std::size_t n_buy() const noexcept { return n_buy_; }
    std::size_t n_sell() const noexcept { return n_sell_; }
    std::size_t n_total() const noexcept { return n_buy_ + n_sell_; }

    // Random-access view of one side, for uniform sampling of resting orders.
    // The index order is a book-internal permutation (swap-remove), fixed for
    // a given operation history.
    std::uint64_t nth_order_id(Side side, std::size_t index) const {
        return side == Side::buy ? bid_ids_[index] : ask_ids_[index];
    }

    std::uint64_t placed_count() const noexcept { return placed_; }
    // Number of executions; each one removes the aggressor and one resting
    // order, so 2 * trade_count() orders have left the book through trades.
    std::uint64_t trade_count() const noexcept { return executed_; }
    std::uint64_t cancelled_count() const noexcept { return cancelled_; }

    const Order* find(std::uint64_t order_id) const {
        const auto it = orders_.find(order_id);
        return it == orders_.end() ? nullptr : &it->second;
    }

    // Ids of all resting orders in entry order (ids are issued sequentially).
    std::vector<std::uint64_t> resting_ids() const {
        std::vector<std::uint64_t> ids;
        ids.reserve(orders_.size());
        for (const auto& [id, order] : orders_) ids.push_back(id);
        return ids;
    }

    template <typename Fn>
    void for_each_order(Fn&& fn) const {
        for (const auto& [id, order] : orders_) fn(order);
    }

    // Depth per price level as delimited text, best levels first.
    void dump_depth(std::ostream& os) const {
        os << "side\tticks\tlog_price\tdepth\n";
        for (const auto& [price, queue] : bids_) {
            os << "bid\t" << price << '\t' << ticks_to_log_price(price) << '\t'
               << queue.size() << '\n';
        }
        for (const auto& [price, queue] : asks_) {
            os << "ask\t" << price << '\t' << ticks_to_log_price(price) << '\t'
               << queue.size() << '\n';
        }
    }

  private:
    PlacementOutcome execute_best(Side resting_side) {
        PlacementOutcome outcome;
        outcome.kind = PlacementOutcome::Kind::executed;
        if (resting_side == Side::sell) {
            auto level = asks_.begin();
            outcome.trade_price_ticks = level->first;
            const std::uint64_t victim = level->second.front();
            level->second.pop_front();
            if (level->second.empty()) asks_.erase(level);
            remove_from_side_vector(orders_.find(victim)->second);
            orders_.erase(victim);
            --n_sell_;
        } else {
            auto level = bids_.begin();
            outcome.trade_price_ticks = level->first;
            const std::uint64_t victim = level->second.front();
            level->second.pop_front();
            if (level->second.empty()) bids_.erase(level);
            remove_from_side_vector(orders_.find(victim)->second);
            orders_.erase(victim);
            --n_buy_;
        }
        ++placed_;
        ++executed_;
        return outcome;
    }

    void remove_from_level(const Order& order) {
        if (order.side == Side::buy) {
            auto level = bids_.find(order.price_ticks);
            auto& queue = level->second;
            queue.erase(std::find(queue.begin(), queue.end(), order.id));
            if (queue.empty()) bids_.erase(level);
            --n_buy_;
        } else {
            auto level = asks_.find(order.price_ticks);
            auto& queue = level->second;
            queue.erase(std::find(queue.begin(), queue.end(), order.id));
            if (queue.empty()) asks_.erase(level);
            --n_sell_;
        }
        remove_from_side_vector(order);
    }

    // Swap-remove from the side's random-access vector, patching the moved
    // order's slot.
    void remove_from_side_vector(const Order& order) {
        auto& ids = order.side == Side::buy ? bid_ids_ : ask_ids_;
        const std::size_t slot = order.side_slot;
        const std::uint64_t moved = ids.back();
        ids[slot] = moved;
        ids.pop_back();
        if (moved != order.id) orders_.find(moved)->second.side_slot = slot;
    }

    // Levels hold FIFO queues of order ids; map ordering puts the best level
    // first on both sides.
    std::map<std::int64_t, std::deque<std::uint64_t>, std::greater<>> bids_;
    std::map<std::int64_t, std::deque<std::uint64_t>, std::less<>> asks_;
    std::map<std::uint64_t, Order> orders_;
    std::vector<std::uint64_t> bid_ids_;
    std::vector<std::uint64_t> ask_ids_;
    std::size_t n_buy_ = 0;
    std::size_t n_sell_ = 0;
    std::uint64_t next_id_ = 1;
    std::uint64_t placed_ = 0;
    std::uint64_t executed_ = 0;
    std::uint64_t cancelled_ = 0;
};

}  // namespace mmf
