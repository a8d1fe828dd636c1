//! Every labeled connected graph on at most five nodes.

use rsd_core::protocol::{run_protocol_with, RunOptions};
use rsd_core::Graph;

#[test]
fn all_connected_graphs_up_to_five_nodes() {
    let mut connected = 0;
    for n in 2..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0..1u32 << pairs.len() {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let Ok(g) = Graph::from_edges(n, &edges) else { continue };
            connected += 1;
            let r = run_protocol_with(&g, RunOptions { record_trace: false, cap_multiplier: 64 })
                .unwrap_or_else(|e| panic!("{edges:?}: {e}"));
            assert!(r.outputs_ok(), "{edges:?}: {:?}", r.outputs);
            assert!(r.audit.all_ok(), "{edges:?}: {:?}", r.audit.issues);
        }
    }
    assert_eq!(connected, 1 + 4 + 38 + 728);
}
