mod common;

use common::bundled;
use evoplat_core::Tile;

#[test]
fn bundled_levels_parse() {
    let w1l1 = bundled("w1l1.txt");
    assert_eq!((w1l1.width(), w1l1.coin_count()), (60, 3));
    assert_eq!(w1l1.to_text(), evoplat_core::levelgen::make_level(60, 3, 2, 7).unwrap().to_text());
    let w1l2 = bundled("w1l2.txt");
    assert_eq!((w1l2.world(), w1l2.stage()), (1, 2));
    assert!((0..w1l2.width() as i32).any(|x| w1l2.get(x, 1) == Some(Tile::Hazard)));
    assert!((0..w1l2.width() as i32).any(|x| w1l2.get(x, 0) == Some(Tile::Empty)), "has a pit");
    assert_eq!(bundled("tiny.txt").width(), 12);
    let flag10 = bundled("flag10.txt");
    assert_eq!(flag10.flag().0 - flag10.start_x(), 10);
}
