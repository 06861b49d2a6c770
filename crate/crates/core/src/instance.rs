//! TTP instance model and benchmark file parsing.
//!
//! The on-disk format is the usual TTP benchmark layout: a block of
//! `KEY: value` headers followed by `NODE_COORD_SECTION` and `ITEMS SECTION`
//! blocks. Distances are CEIL_2D (Euclidean rounded up to an integer), the
//! only edge weight type supported here.

use std::error::Error;
use std::fmt;

/// A city, identified externally by its 1-based file index and internally by
/// its position in [`Instance::cities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct City {
    pub x: f64,
    pub y: f64,
}

/// An item stored in some city. `city` is a 0-based index into
/// [`Instance::cities`]; profits may be zero, weights must be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    pub profit: f64,
    pub weight: f64,
    pub city: usize,
}

/// An immutable TTP instance.
///
/// The knapsack is rented at `renting_ratio` per time unit and the thief
/// slows down linearly in carried weight: at weight `w` the velocity is
/// `v_max - speed_coeff * w`, reaching `v_min` when the knapsack is full.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub knapsack_data_type: String,
    pub capacity: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub renting_ratio: f64,
    pub cities: Vec<City>,
    pub items: Vec<Item>,
    /// Item indices grouped by city, ascending within each city.
    pub items_by_city: Vec<Vec<usize>>,
    /// `(v_max - v_min) / capacity`, or 0 for a zero-capacity knapsack.
    pub speed_coeff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    /// Header or section line that could not be parsed.
    Malformed { line: usize, message: String },
    /// A required header key never appeared.
    MissingHeader { key: &'static str },
    /// DIMENSION / NUMBER OF ITEMS disagreed with the section body.
    CountMismatch { what: &'static str, expected: usize, found: usize },
    /// Duplicate 1-based id inside a section.
    DuplicateId { line: usize, what: &'static str, id: usize },
    /// Item assigned to a city id outside `1..=n`.
    CityOutOfRange { line: usize, item: usize, city: i64, n: usize },
    /// Capacity or a speed that must be positive was not.
    NonPositive { line: usize, field: &'static str },
    /// MIN SPEED >= MAX SPEED.
    SpeedOrder { line: usize },
    /// Item with zero or negative weight.
    BadItemWeight { line: usize, item: usize },
    /// Negative item profit.
    BadItemProfit { line: usize, item: usize },
    UnsupportedEdgeWeightType { line: usize, found: String },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InstanceError::*;
        match self {
            Malformed { line, message } => write!(f, "line {line}: {message}"),
            MissingHeader { key } => write!(f, "missing required header {key}"),
            CountMismatch { what, expected, found } => {
                write!(f, "{what} count mismatch: header says {expected}, section has {found}")
            }
            DuplicateId { line, what, id } => write!(f, "line {line}: duplicate {what} id {id}"),
            CityOutOfRange { line, item, city, n } => {
                write!(f, "line {line}: item {item} references city {city}, outside 1..={n}")
            }
            NonPositive { line, field } => write!(f, "line {line}: {field} must be positive"),
            SpeedOrder { line } => write!(f, "line {line}: MIN SPEED must be below MAX SPEED"),
            BadItemWeight { line, item } => {
                write!(f, "line {line}: item {item} must have positive weight")
            }
            BadItemProfit { line, item } => {
                write!(f, "line {line}: item {item} has negative profit")
            }
            UnsupportedEdgeWeightType { line, found } => {
                write!(f, "line {line}: unsupported EDGE_WEIGHT_TYPE {found:?} (only CEIL_2D)")
            }
        }
    }
}

impl Error for InstanceError {}

impl Instance {
    /// Builds an instance from parts, deriving `items_by_city` and
    /// `speed_coeff`. Accepts `capacity == 0` (nothing ever fits); the file
    /// parser is stricter and rejects it.
    pub fn new(
        name: impl Into<String>,
        knapsack_data_type: impl Into<String>,
        capacity: f64,
        v_min: f64,
        v_max: f64,
        renting_ratio: f64,
        cities: Vec<City>,
        items: Vec<Item>,
    ) -> Result<Self, InstanceError> {
        if cities.is_empty() {
            return Err(InstanceError::CountMismatch { what: "city", expected: 1, found: 0 });
        }
        if !(capacity >= 0.0) || !capacity.is_finite() {
            return Err(InstanceError::NonPositive { line: 0, field: "CAPACITY OF KNAPSACK" });
        }
        if !(v_min > 0.0) {
            return Err(InstanceError::NonPositive { line: 0, field: "MIN SPEED" });
        }
        if !(v_min < v_max) {
            return Err(InstanceError::SpeedOrder { line: 0 });
        }
        if !(renting_ratio >= 0.0) || !renting_ratio.is_finite() {
            return Err(InstanceError::NonPositive { line: 0, field: "RENTING RATIO" });
        }
        for (k, it) in items.iter().enumerate() {
            if !(it.weight > 0.0) || !it.weight.is_finite() {
                return Err(InstanceError::BadItemWeight { line: 0, item: k + 1 });
            }
            if !(it.profit >= 0.0) || !it.profit.is_finite() {
                return Err(InstanceError::BadItemProfit { line: 0, item: k + 1 });
            }
        }
        let items_by_city = group_items_by_city(&items, cities.len())?;
        let speed_coeff = if capacity > 0.0 { (v_max - v_min) / capacity } else { 0.0 };
        Ok(Instance {
            name: name.into(),
            knapsack_data_type: knapsack_data_type.into(),
            capacity,
            v_min,
            v_max,
            renting_ratio,
            cities,
            items,
            items_by_city,
            speed_coeff,
        })
    }

    pub fn n(&self) -> usize {
        self.cities.len()
    }

    pub fn m(&self) -> usize {
        self.items.len()
    }

    /// CEIL_2D distance between two cities (0-based indices): the Euclidean
    /// distance rounded up to the next integer. Computed on demand; no
    /// distance matrix is kept.
    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> u64 {
        let ca = self.cities[a];
        let cb = self.cities[b];
        let dx = ca.x - cb.x;
        let dy = ca.y - cb.y;
        (dx * dx + dy * dy).sqrt().ceil() as u64
    }

    /// Total tour length under CEIL_2D, including the closing leg.
    pub fn tour_length(&self, order: &[usize]) -> u64 {
        let n = order.len();
        (0..n).map(|p| self.distance(order[p], order[(p + 1) % n])).sum()
    }
}

/// Groups item indices by their city, ascending item index within each city.
/// Errors if an item references a city outside `0..n`.
pub fn group_items_by_city(items: &[Item], n: usize) -> Result<Vec<Vec<usize>>, InstanceError> {
    let mut by_city = vec![Vec::new(); n];
    for (k, it) in items.iter().enumerate() {
        if it.city >= n {
            return Err(InstanceError::CityOutOfRange {
                line: 0,
                item: k + 1,
                city: it.city as i64 + 1,
                n,
            });
        }
        by_city[it.city].push(k);
    }
    Ok(by_city)
}

struct HeaderValues {
    name: Option<String>,
    kdt: Option<String>,
    dimension: Option<(usize, usize)>,
    item_count: Option<(usize, usize)>,
    capacity: Option<(f64, usize)>,
    v_min: Option<(f64, usize)>,
    v_max: Option<(f64, usize)>,
    renting_ratio: Option<(f64, usize)>,
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, InstanceError> {
    s.trim().parse().map_err(|_| InstanceError::Malformed {
        line,
        message: format!("cannot parse {what} from {:?}", s.trim()),
    })
}

/// Parses the TTP benchmark text format.
///
/// Header keys are matched case-insensitively and tolerate arbitrary
/// whitespace; unknown keys are ignored with a warning. The section bodies
/// must match DIMENSION / NUMBER OF ITEMS exactly, and ids inside them may
/// appear in any order but must cover `1..=count` without duplicates.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Nodes,
        Items,
    }

    let mut hv = HeaderValues {
        name: None,
        kdt: None,
        dimension: None,
        item_count: None,
        capacity: None,
        v_min: None,
        v_max: None,
        renting_ratio: None,
    };
    let mut section = Section::Header;
    // (line, id, fields...) for later validation against the headers
    let mut node_lines: Vec<(usize, usize, f64, f64)> = Vec::new();
    let mut item_lines: Vec<(usize, usize, f64, f64, i64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "EOF" {
            continue;
        }

        let upper = line.to_ascii_uppercase();
        if upper.starts_with("NODE_COORD_SECTION") {
            section = Section::Nodes;
            continue;
        }
        if upper.starts_with("ITEMS SECTION") {
            section = Section::Items;
            continue;
        }

        match section {
            Section::Header => {
                let Some(colon) = line.find(':') else {
                    return Err(InstanceError::Malformed {
                        line: lineno,
                        message: format!("expected KEY: value, got {line:?}"),
                    });
                };
                let key = line[..colon].split_whitespace().collect::<Vec<_>>().join(" ").to_ascii_uppercase();
                let value = line[colon + 1..].trim();
                match key.as_str() {
                    "PROBLEM NAME" => hv.name = Some(value.to_string()),
                    "KNAPSACK DATA TYPE" => hv.kdt = Some(value.to_string()),
                    "DIMENSION" => hv.dimension = Some((parse_num(value, lineno, "DIMENSION")?, lineno)),
                    "NUMBER OF ITEMS" => hv.item_count = Some((parse_num(value, lineno, "NUMBER OF ITEMS")?, lineno)),
                    "CAPACITY OF KNAPSACK" => hv.capacity = Some((parse_num(value, lineno, "capacity")?, lineno)),
                    "MIN SPEED" => hv.v_min = Some((parse_num(value, lineno, "MIN SPEED")?, lineno)),
                    "MAX SPEED" => hv.v_max = Some((parse_num(value, lineno, "MAX SPEED")?, lineno)),
                    "RENTING RATIO" => hv.renting_ratio = Some((parse_num(value, lineno, "RENTING RATIO")?, lineno)),
                    "EDGE_WEIGHT_TYPE" => {
                        if !value.eq_ignore_ascii_case("CEIL_2D") {
                            return Err(InstanceError::UnsupportedEdgeWeightType {
                                line: lineno,
                                found: value.to_string(),
                            });
                        }
                    }
                    _ => log::warn!("line {lineno}: ignoring unknown header key {key:?}"),
                }
            }
            Section::Nodes => {
                let mut f = line.split_whitespace();
                let (Some(id), Some(x), Some(y)) = (f.next(), f.next(), f.next()) else {
                    return Err(InstanceError::Malformed {
                        line: lineno,
                        message: format!("expected `id x y`, got {line:?}"),
                    });
                };
                let id: usize = parse_num(id, lineno, "city id")?;
                let x: f64 = parse_num(x, lineno, "x coordinate")?;
                let y: f64 = parse_num(y, lineno, "y coordinate")?;
                if !x.is_finite() || !y.is_finite() {
                    return Err(InstanceError::Malformed {
                        line: lineno,
                        message: "coordinates must be finite".into(),
                    });
                }
                node_lines.push((lineno, id, x, y));
            }
            Section::Items => {
                let mut f = line.split_whitespace();
                let (Some(id), Some(p), Some(w), Some(c)) = (f.next(), f.next(), f.next(), f.next())
                else {
                    return Err(InstanceError::Malformed {
                        line: lineno,
                        message: format!("expected `id profit weight city`, got {line:?}"),
                    });
                };
                let id: usize = parse_num(id, lineno, "item id")?;
                let p: f64 = parse_num(p, lineno, "profit")?;
                let w: f64 = parse_num(w, lineno, "weight")?;
                let c: i64 = parse_num(c, lineno, "assigned city")?;
                item_lines.push((lineno, id, p, w, c));
            }
        }
    }

    let (n, dim_line) = hv.dimension.ok_or(InstanceError::MissingHeader { key: "DIMENSION" })?;
    let (m, _) = hv.item_count.ok_or(InstanceError::MissingHeader { key: "NUMBER OF ITEMS" })?;
    let (capacity, cap_line) =
        hv.capacity.ok_or(InstanceError::MissingHeader { key: "CAPACITY OF KNAPSACK" })?;
    let (v_min, vmin_line) = hv.v_min.ok_or(InstanceError::MissingHeader { key: "MIN SPEED" })?;
    let (v_max, vmax_line) = hv.v_max.ok_or(InstanceError::MissingHeader { key: "MAX SPEED" })?;
    let (renting_ratio, rr_line) =
        hv.renting_ratio.ok_or(InstanceError::MissingHeader { key: "RENTING RATIO" })?;

    if n == 0 {
        return Err(InstanceError::NonPositive { line: dim_line, field: "DIMENSION" });
    }
    if !(capacity > 0.0) || !capacity.is_finite() {
        return Err(InstanceError::NonPositive { line: cap_line, field: "CAPACITY OF KNAPSACK" });
    }
    if !(v_min > 0.0) {
        return Err(InstanceError::NonPositive { line: vmin_line, field: "MIN SPEED" });
    }
    if !(v_max > 0.0) {
        return Err(InstanceError::NonPositive { line: vmax_line, field: "MAX SPEED" });
    }
    if v_min >= v_max {
        return Err(InstanceError::SpeedOrder { line: vmax_line });
    }
    if !(renting_ratio >= 0.0) || !renting_ratio.is_finite() {
        return Err(InstanceError::NonPositive { line: rr_line, field: "RENTING RATIO" });
    }

    if node_lines.len() != n {
        return Err(InstanceError::CountMismatch { what: "city", expected: n, found: node_lines.len() });
    }
    if item_lines.len() != m {
        return Err(InstanceError::CountMismatch { what: "item", expected: m, found: item_lines.len() });
    }

    let mut cities = vec![None; n];
    for (lineno, id, x, y) in node_lines {
        if id == 0 || id > n {
            return Err(InstanceError::Malformed {
                line: lineno,
                message: format!("city id {id} outside 1..={n}"),
            });
        }
        if cities[id - 1].replace(City { x, y }).is_some() {
            return Err(InstanceError::DuplicateId { line: lineno, what: "city", id });
        }
    }
    let cities: Vec<City> = cities.into_iter().map(|c| c.unwrap()).collect();

    let mut items = vec![None; m];
    for (lineno, id, profit, weight, city) in item_lines {
        if id == 0 || id > m {
            return Err(InstanceError::Malformed {
                line: lineno,
                message: format!("item id {id} outside 1..={m}"),
            });
        }
        if city < 1 || city as usize > n {
            return Err(InstanceError::CityOutOfRange { line: lineno, item: id, city, n });
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(InstanceError::BadItemWeight { line: lineno, item: id });
        }
        if !(profit >= 0.0) || !profit.is_finite() {
            return Err(InstanceError::BadItemProfit { line: lineno, item: id });
        }
        let slot = Item { profit, weight, city: city as usize - 1 };
        if items[id - 1].replace(slot).is_some() {
            return Err(InstanceError::DuplicateId { line: lineno, what: "item", id });
        }
    }
    let items: Vec<Item> = items.into_iter().map(|i| i.unwrap()).collect();

    Instance::new(
        hv.name.unwrap_or_default(),
        hv.kdt.unwrap_or_default(),
        capacity,
        v_min,
        v_max,
        renting_ratio,
        cities,
        items,
    )
}

/// Renders an instance back into the benchmark text format. Floats use the
/// shortest round-trip representation, so `parse_instance(to_ttp_string(i))`
/// reproduces `i` exactly.
pub fn to_ttp_string(inst: &Instance) -> String {
    use fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "PROBLEM NAME: {}", inst.name);
    let _ = writeln!(s, "KNAPSACK DATA TYPE: {}", inst.knapsack_data_type);
    let _ = writeln!(s, "DIMENSION: {}", inst.n());
    let _ = writeln!(s, "NUMBER OF ITEMS: {}", inst.m());
    let _ = writeln!(s, "CAPACITY OF KNAPSACK: {}", inst.capacity);
    let _ = writeln!(s, "MIN SPEED: {}", inst.v_min);
    let _ = writeln!(s, "MAX SPEED: {}", inst.v_max);
    let _ = writeln!(s, "RENTING RATIO: {}", inst.renting_ratio);
    let _ = writeln!(s, "EDGE_WEIGHT_TYPE: CEIL_2D");
    let _ = writeln!(s, "NODE_COORD_SECTION\t(INDEX, X, Y):");
    for (i, c) in inst.cities.iter().enumerate() {
        let _ = writeln!(s, "{} {} {}", i + 1, c.x, c.y);
    }
    let _ = writeln!(s, "ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):");
    for (k, it) in inst.items.iter().enumerate() {
        let _ = writeln!(s, "{} {} {} {}", k + 1, it.profit, it.weight, it.city + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verification::tiny3;

    const TINY3_TEXT: &str = "\
PROBLEM NAME: tiny3
KNAPSACK DATA TYPE: uncorr
DIMENSION: 3
NUMBER OF ITEMS: 2
CAPACITY OF KNAPSACK: 3
MIN SPEED: 0.1
MAX SPEED: 1.0
RENTING RATIO: 1.0
EDGE_WEIGHT_TYPE: CEIL_2D
NODE_COORD_SECTION\t(INDEX, X, Y):
1 0 0
2 3 0
3 0 4
ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
1 20 2 2
2 30 3 3
";

    #[test]
    fn parses_tiny3() {
        let inst = parse_instance(TINY3_TEXT).unwrap();
        assert_eq!(inst.name, "tiny3");
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.capacity, 3.0);
        assert_eq!(inst.v_min, 0.1);
        assert_eq!(inst.v_max, 1.0);
        assert_eq!(inst.renting_ratio, 1.0);
        assert_eq!(inst.speed_coeff, (1.0 - 0.1) / 3.0);
        assert_eq!(inst.speed_coeff, 0.3);
        assert_eq!(inst.items[0], Item { profit: 20.0, weight: 2.0, city: 1 });
        assert_eq!(inst.items[1], Item { profit: 30.0, weight: 3.0, city: 2 });
        assert_eq!(inst.items_by_city, vec![vec![], vec![0], vec![1]]);
        assert_eq!(inst, tiny3());
    }

    #[test]
    fn header_keys_are_case_insensitive_and_whitespace_tolerant() {
        let text = TINY3_TEXT
            .replace("PROBLEM NAME:", "problem name :")
            .replace("CAPACITY OF KNAPSACK:", "Capacity  of   Knapsack:")
            .replace("MIN SPEED:", "min speed:");
        let inst = parse_instance(&text).unwrap();
        assert_eq!(inst, tiny3());
    }

    #[test]
    fn unknown_header_key_is_ignored() {
        let text = TINY3_TEXT.replace(
            "EDGE_WEIGHT_TYPE: CEIL_2D",
            "EDGE_WEIGHT_TYPE: CEIL_2D\nCOMMENT: generated for a smoke test",
        );
        assert_eq!(parse_instance(&text).unwrap(), tiny3());
    }

    #[test]
    fn sections_may_list_ids_out_of_order() {
        let text = TINY3_TEXT.replace("1 0 0\n2 3 0\n3 0 4", "3 0 4\n1 0 0\n2 3 0");
        assert_eq!(parse_instance(&text).unwrap(), tiny3());
    }

    #[test]
    fn city_count_mismatch_is_reported() {
        let text = TINY3_TEXT.replace("3 0 4\n", "");
        assert_eq!(
            parse_instance(&text).unwrap_err(),
            InstanceError::CountMismatch { what: "city", expected: 3, found: 2 }
        );
    }

    #[test]
    fn item_city_out_of_range_is_reported_with_line() {
        let text = TINY3_TEXT.replace("2 30 3 3", "2 30 3 4");
        match parse_instance(&text).unwrap_err() {
            InstanceError::CityOutOfRange { line, item, city, n } => {
                assert_eq!((item, city, n), (2, 4, 3));
                assert_eq!(line, 16);
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn zero_weight_item_is_rejected() {
        let text = TINY3_TEXT.replace("1 20 2 2", "1 20 0 2");
        assert!(matches!(
            parse_instance(&text).unwrap_err(),
            InstanceError::BadItemWeight { item: 1, .. }
        ));
    }

    #[test]
    fn speed_order_is_enforced() {
        let text = TINY3_TEXT.replace("MAX SPEED: 1.0", "MAX SPEED: 0.1");
        assert!(matches!(parse_instance(&text).unwrap_err(), InstanceError::SpeedOrder { .. }));
    }

    #[test]
    fn non_positive_capacity_is_rejected() {
        for bad in ["0", "-4"] {
            let text = TINY3_TEXT.replace("CAPACITY OF KNAPSACK: 3", &format!("CAPACITY OF KNAPSACK: {bad}"));
            assert!(matches!(
                parse_instance(&text).unwrap_err(),
                InstanceError::NonPositive { field: "CAPACITY OF KNAPSACK", .. }
            ));
        }
    }

    #[test]
    fn missing_header_is_reported() {
        let text = TINY3_TEXT.replace("RENTING RATIO: 1.0\n", "");
        assert_eq!(
            parse_instance(&text).unwrap_err(),
            InstanceError::MissingHeader { key: "RENTING RATIO" }
        );
    }

    #[test]
    fn unsupported_edge_weight_type_is_rejected() {
        let text = TINY3_TEXT.replace("CEIL_2D", "EUC_2D");
        assert!(matches!(
            parse_instance(&text).unwrap_err(),
            InstanceError::UnsupportedEdgeWeightType { .. }
        ));
    }

    #[test]
    fn duplicate_city_id_is_rejected() {
        let text = TINY3_TEXT.replace("2 3 0", "1 3 0");
        assert!(matches!(parse_instance(&text).unwrap_err(), InstanceError::DuplicateId { .. }));
    }

    #[test]
    fn tiny3_distances() {
        let inst = tiny3();
        assert_eq!(inst.distance(0, 1), 3);
        assert_eq!(inst.distance(0, 2), 4);
        assert_eq!(inst.distance(1, 2), 5);
        assert_eq!(inst.distance(1, 1), 0);
        assert_eq!(inst.tour_length(&[0, 1, 2]), 12);
    }

    #[test]
    fn ceil_2d_rounds_up() {
        let inst = Instance::new(
            "pair",
            "",
            1.0,
            0.1,
            1.0,
            1.0,
            vec![City { x: 0.0, y: 0.0 }, City { x: 1.0, y: 1.0 }],
            vec![],
        )
        .unwrap();
        // sqrt(2) = 1.41.. rounds up to 2
        assert_eq!(inst.distance(0, 1), 2);
    }

    #[test]
    fn one_city_speed_coeff() {
        let inst = Instance::new("solo", "", 10.0, 0.1, 1.0, 1.0, vec![City { x: 0.0, y: 0.0 }], vec![])
            .unwrap();
        assert_eq!(inst.speed_coeff, (1.0 - 0.1) / 10.0);
        assert_eq!(inst.speed_coeff, 0.09);
        assert_eq!(inst.items_by_city, vec![Vec::<usize>::new()]);
    }

    #[test]
    fn grouping_matches_hand_layout() {
        // 9 items over 4 cities: city 1 holds items 1-4, city 2 holds 5-6,
        // city 3 holds nothing, city 4 holds 7-9.
        let items: Vec<Item> = [(0, 4), (1, 2), (3, 3)]
            .iter()
            .flat_map(|&(city, count)| {
                (0..count).map(move |_| Item { profit: 1.0, weight: 1.0, city })
            })
            .collect();
        let grouped = group_items_by_city(&items, 4).unwrap();
        assert_eq!(grouped, vec![vec![0, 1, 2, 3], vec![4, 5], vec![], vec![6, 7, 8]]);
    }

    #[test]
    fn grouping_rejects_out_of_range_city() {
        let items = vec![Item { profit: 1.0, weight: 1.0, city: 4 }];
        assert!(group_items_by_city(&items, 4).is_err());
    }

    #[test]
    fn round_trip_through_text() {
        let inst = tiny3();
        let text = to_ttp_string(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);

        // fractional coordinates and weights survive as well
        let odd = Instance::new(
            "odd",
            "mixed",
            7.25,
            0.31,
            1.75,
            0.125,
            vec![City { x: 1.5, y: -2.25 }, City { x: 0.1, y: 0.7 }],
            vec![Item { profit: 0.0, weight: 0.2, city: 1 }],
        )
        .unwrap();
        assert_eq!(parse_instance(&to_ttp_string(&odd)).unwrap(), odd);
    }

    #[test]
    fn distance_is_symmetric_and_nonnegative() {
        let inst = tiny3();
        for a in 0..inst.n() {
            for b in 0..inst.n() {
                assert_eq!(inst.distance(a, b), inst.distance(b, a));
            }
        }
    }
}
