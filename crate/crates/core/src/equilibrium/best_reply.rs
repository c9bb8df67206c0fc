//! Best replies of each consumer to the other's orders.
//!
//! A consumer maximises the units received. Every order is affordable, so the
//! problem reduces to filling the home supply and whatever the other consumer
//! left of the foreign supply, buying the cheaper source first. When several
//! orders give the same payoff the selection rules pick one:
//!
//! * `Sr1`: least expenditure;
//! * `Sr2`: among equal expenditures, the largest home order;
//! * `Sr3`: a free home good is ordered in full.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, PriceState, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectionRule {
    /// The reply set is a single point.
    Unique,
    Sr1,
    Sr2,
    Sr3,
}

/// Row of a reply table: how much of the foreign good is left to buy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Row {
    /// Nothing left abroad.
    I,
    /// Some left, affordable in full.
    II,
    /// More left than the income buys.
    III,
}

/// Column of a reply table: affordability of the home supply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    /// Home supply affordable with income to spare.
    A,
    /// Home supply plus remaining foreign supply affordable.
    A1,
    /// Home supply affordable, remaining foreign supply is not.
    A2,
    /// Home supply not affordable.
    B,
    /// Home good free.
    Free,
}

/// Home price compared with the import price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PriceOrder {
    HomeCheaper,
    Equal,
    ImportCheaper,
}

/// Cell of the reply table that produced a reply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TableCell {
    /// 1 and 2 for positive home prices, 3 and 4 when the home good is free.
    pub table: u8,
    pub row: Row,
    pub column: Column,
    pub price_order: Option<PriceOrder>,
}

impl fmt::Display for TableCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{:?}-{:?}", self.table, self.row, self.column)?;
        if let Some(o) = self.price_order {
            let k = match o {
                PriceOrder::HomeCheaper => 1,
                PriceOrder::Equal => 2,
                PriceOrder::ImportCheaper => 3,
            };
            write!(f, "({k})")?;
        }
        Ok(())
    }
}

/// Closed interval `[lo, hi]`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }
}

/// Envelope of the payoff-maximising orders before a selection rule applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSet {
    pub home: Interval,
    pub foreign: Interval,
}

/// A best reply `(home order, foreign order)` with its provenance in the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestReply {
    pub home: f64,
    pub foreign: f64,
    pub cell: TableCell,
    pub selection: SelectionRule,
    pub raw_set: RawSet,
}

fn price_order(home: f64, import: f64) -> PriceOrder {
    if (home - import).abs() <= EPS {
        PriceOrder::Equal
    } else if home < import {
        PriceOrder::HomeCheaper
    } else {
        PriceOrder::ImportCheaper
    }
}

/// Reply of consumer I, `(alpha, beta)`, to consumer II's orders.
///
/// Only `delta` matters: it fixes what is left of good 2.
pub fn best_reply_1(other: (f64, f64), prices: &PriceState, params: &ModelParams) -> Result<BestReply> {
    let (_, delta) = other;
    reply(delta, prices.p1, prices.p2_import(params), params.y1, params.q1, params.q2, 1)
}

/// Reply of consumer II, `(gamma, delta)`, to consumer I's orders.
///
/// Only `alpha` matters. Computed as consumer I's problem in the relabelled
/// economy, so `home` is `delta` and `foreign` is `gamma`.
pub fn best_reply_2(other: (f64, f64), prices: &PriceState, params: &ModelParams) -> Result<BestReply> {
    let (alpha, _) = other;
    reply(alpha, prices.p2, prices.p1_import(params), params.y2, params.q2, params.q1, 2)
}

fn reply(
    other_home: f64,
    p_home: f64,
    p_import: f64,
    income: f64,
    q_home: f64,
    q_foreign: f64,
    consumer: u8,
) -> Result<BestReply> {
    if !(other_home.is_finite() && other_home >= -EPS) {
        return Err(Error::Domain(format!("opponent order must be >= 0, got {other_home}")));
    }
    if p_home == 0.0 && p_import <= p_home {
        return Err(Error::DegeneratePrice);
    }
    let left = q_foreign - other_home;
    let foreign_cap = income / p_import;
    let cell = |table_offset: u8, row, column, price_order| TableCell {
        table: consumer + table_offset,
        row,
        column,
        price_order,
    };

    if p_home == 0.0 {
        let (row, foreign) = if left <= EPS {
            (Row::I, 0.0)
        } else if left <= foreign_cap + EPS {
            (Row::II, left.min(foreign_cap))
        } else {
            (Row::III, foreign_cap)
        };
        let raw = RawSet {
            home: Interval::new(q_home, f64::INFINITY),
            foreign: Interval::new(foreign, foreign_cap),
        };
        return Ok(BestReply {
            home: q_home,
            foreign,
            cell: cell(2, row, Column::Free, None),
            selection: SelectionRule::Sr3,
            raw_set: raw,
        });
    }

    let home_cap = income / p_home;
    let rich = income > p_home * q_home + EPS;
    let order = price_order(p_home, p_import);

    // Row I: nothing left abroad.
    if left <= EPS {
        return Ok(if rich {
            BestReply {
                home: q_home,
                foreign: 0.0,
                cell: cell(0, Row::I, Column::A, None),
                selection: SelectionRule::Sr1,
                raw_set: RawSet {
                    home: Interval::new(q_home, home_cap),
                    foreign: Interval::new(0.0, (income - p_home * q_home) / p_import),
                },
            }
        } else {
            BestReply {
                home: home_cap,
                foreign: 0.0,
                cell: cell(0, Row::I, Column::B, None),
                selection: SelectionRule::Unique,
                raw_set: RawSet { home: Interval::point(home_cap), foreign: Interval::point(0.0) },
            }
        });
    }

    // Row II: the remainder abroad is affordable in full.
    if left <= foreign_cap + EPS {
        let left = left.min(foreign_cap);
        let home_after_foreign = (income - p_import * left) / p_home;
        if rich && p_home * q_home + p_import * left < income - EPS {
            return Ok(BestReply {
                home: q_home,
                foreign: left,
                cell: cell(0, Row::II, Column::A1, None),
                selection: SelectionRule::Sr1,
                raw_set: RawSet {
                    home: Interval::new(q_home, home_after_foreign),
                    foreign: Interval::new(left, (income - p_home * q_home) / p_import),
                },
            });
        }
        if rich {
            let spare = (income - p_home * q_home) / p_import;
            return Ok(match order {
                PriceOrder::HomeCheaper => BestReply {
                    home: q_home,
                    foreign: spare,
                    cell: cell(0, Row::II, Column::A2, Some(order)),
                    selection: SelectionRule::Unique,
                    raw_set: RawSet { home: Interval::point(q_home), foreign: Interval::point(spare) },
                },
                PriceOrder::Equal => BestReply {
                    home: q_home,
                    foreign: spare,
                    cell: cell(0, Row::II, Column::A2, Some(order)),
                    selection: SelectionRule::Sr2,
                    raw_set: RawSet {
                        home: Interval::new(home_after_foreign, q_home),
                        foreign: Interval::new(spare, left),
                    },
                },
                PriceOrder::ImportCheaper => BestReply {
                    home: home_after_foreign,
                    foreign: left,
                    cell: cell(0, Row::II, Column::A2, Some(order)),
                    selection: SelectionRule::Unique,
                    raw_set: RawSet {
                        home: Interval::point(home_after_foreign),
                        foreign: Interval::point(left),
                    },
                },
            });
        }
        return Ok(match order {
            PriceOrder::HomeCheaper | PriceOrder::Equal => BestReply {
                home: home_cap,
                foreign: 0.0,
                cell: cell(0, Row::II, Column::B, Some(order)),
                selection: if order == PriceOrder::Equal { SelectionRule::Sr2 } else { SelectionRule::Unique },
                raw_set: if order == PriceOrder::Equal {
                    RawSet { home: Interval::new(home_after_foreign, home_cap), foreign: Interval::new(0.0, left) }
                } else {
                    RawSet { home: Interval::point(home_cap), foreign: Interval::point(0.0) }
                },
            },
            PriceOrder::ImportCheaper => BestReply {
                home: home_after_foreign,
                foreign: left,
                cell: cell(0, Row::II, Column::B, Some(order)),
                selection: SelectionRule::Unique,
                raw_set: RawSet { home: Interval::point(home_after_foreign), foreign: Interval::point(left) },
            },
        });
    }

    // Row III: more left abroad than the income buys.
    let column = if rich { Column::A } else { Column::B };
    let (home_pref, foreign_pref) = if rich {
        (q_home, (income - p_home * q_home) / p_import)
    } else {
        (home_cap, 0.0)
    };
    Ok(match order {
        PriceOrder::HomeCheaper | PriceOrder::Equal => BestReply {
            home: home_pref,
            foreign: foreign_pref,
            cell: cell(0, Row::III, column, Some(order)),
            selection: if order == PriceOrder::Equal { SelectionRule::Sr2 } else { SelectionRule::Unique },
            raw_set: if order == PriceOrder::Equal {
                RawSet { home: Interval::new(0.0, home_pref), foreign: Interval::new(foreign_pref, foreign_cap) }
            } else {
                RawSet { home: Interval::point(home_pref), foreign: Interval::point(foreign_pref) }
            },
        },
        PriceOrder::ImportCheaper => BestReply {
            home: 0.0,
            foreign: foreign_cap,
            cell: cell(0, Row::III, column, Some(order)),
            selection: SelectionRule::Unique,
            raw_set: RawSet { home: Interval::point(0.0), foreign: Interval::point(foreign_cap) },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(4.0, 6.0, 2.0, 3.0, 0.5).unwrap()
    }

    #[test]
    fn rich_consumer_with_nothing_abroad_buys_home_supply() {
        let p = PriceState::new(1.0, 1.0).unwrap();
        let r = best_reply_1((0.0, 3.0), &p, &params()).unwrap();
        assert_eq!((r.home, r.foreign), (2.0, 0.0));
        assert_eq!(r.selection, SelectionRule::Sr1);
        assert_eq!(r.cell.to_string(), "1-I-A");
    }

    #[test]
    fn poor_consumer_spends_all_at_home() {
        let m = ModelParams::new(2.0, 6.0, 2.0, 3.0, 0.5).unwrap();
        let p = PriceState::new(2.0, 1.0).unwrap();
        let r = best_reply_1((0.0, 3.0), &p, &m).unwrap();
        assert_eq!((r.home, r.foreign), (1.0, 0.0));
    }

    #[test]
    fn equal_prices_prefer_home() {
        // p1 = p2 + rho
        let m = ModelParams::new(2.0, 1.0, 2.0, 3.0, 0.5).unwrap();
        let p = PriceState::new(1.5, 1.0).unwrap();
        let r = best_reply_1((0.0, 2.5), &p, &m).unwrap();
        assert_eq!(r.selection, SelectionRule::Sr2);
        assert!((r.home - 2.0 / 1.5).abs() < 1e-15);
        assert_eq!(r.foreign, 0.0);
    }

    #[test]
    fn cheap_imports_are_bought_first() {
        let m = ModelParams::new(2.0, 1.0, 2.0, 3.0, 0.5).unwrap();
        let p = PriceState::new(3.0, 0.5).unwrap();
        let r = best_reply_1((0.0, 2.5), &p, &m).unwrap();
        // 0.5 left abroad at price 1, rest at home
        assert!((r.foreign - 0.5).abs() < 1e-15);
        assert!((r.home - 0.5).abs() < 1e-15);
    }

    #[test]
    fn free_home_good() {
        let m = params();
        let p = PriceState::new(1.0, 0.0).unwrap();
        let r = best_reply_2((0.5, 0.0), &p, &m).unwrap();
        assert_eq!(r.cell.table, 4);
        assert_eq!(r.selection, SelectionRule::Sr3);
        assert_eq!(r.home, 3.0);
        assert!((r.foreign - 1.5).abs() < 1e-15);
        let r = best_reply_2((0.0, 0.0), &p, &ModelParams { y2: 1.0, ..m }).unwrap();
        assert!((r.foreign - 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn reply_spends_within_budget() {
        let m = ModelParams::new(3.0, 2.0, 2.0, 3.0, 0.7).unwrap();
        for p1 in [0.3, 1.0, 1.7, 2.5] {
            for p2 in [0.2, 0.9, 1.6, 3.0] {
                let p = PriceState::new(p1, p2).unwrap();
                for d in [0.0, 0.5, 1.5, 3.0] {
                    let r = best_reply_1((0.0, d), &p, &m).unwrap();
                    assert!(r.home * p1 + r.foreign * (p2 + m.rho) <= m.y1 + 1e-9);
                    assert!(r.home >= 0.0 && r.foreign >= 0.0);
                }
            }
        }
    }
}
