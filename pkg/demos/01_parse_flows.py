"""Walk through flow ingestion: one line at a time, then a whole file.

Shows how raw capture rows map onto typed records, how the free-form label
string collapses into one of four classes, and what the reader counts while
it skips damage.
"""
import tempfile
from pathlib import Path

from flowsift import (classify_label, label_distribution, parse_line,
                      read_flows, render_line)

ROWS = [
    "2011/08/10 09:46:53.047277,3550.182373,udp,212.50.71.179,39678,"
    "  <->,147.32.84.229,13363,CON,0,0,12,875,413,"
    "flow=Background-UDP-Established",
    "2011/08/10 10:01:12.000500,0.102,tcp,147.32.84.165,0x0d3e,"
    "   ->,174.37.196.55,6667,SPA,0,0,6,466,302,"
    "flow=From-Botnet-V42-TCP-Attempt",
    "2011/08/10 10:02:00.250000,0.051,tcp,147.32.84.165,1025,"
    "   ->,174.37.196.55,443,SPA,0,0,4,264,132,"
    "flow=From-Botnet-V42-TCP-CC-HTTP",
    "2011/08/10 10:03:30.000000,1.5,tcp,147.32.84.170,2077,"
    "   ->,74.125.232.195,80,SPA,0,0,10,1200,600,"
    "flow=To-Normal-V42-HTTP",
]


def main():
    print("=== one line, parsed ===")
    rec = parse_line(ROWS[1], line_no=2)
    print(f"source        {rec.src_addr}:{rec.sport} (hex port accepted)")
    print(f"start         {rec.start_time_us} microseconds since epoch")
    print(f"duration      {rec.dur}s, {rec.tot_pkts} packets, "
          f"{rec.tot_bytes} bytes ({rec.src_bytes} from the source)")
    print(f"label         {rec.label_raw!r} -> {rec.label_class.token}")

    print()
    print("=== label rule, most specific substring first ===")
    for raw in ("flow=From-Botnet-V42-TCP-CC-HTTP",
                "flow=From-Botnet-V42-TCP-Attempt",
                "flow=To-Normal-V42-HTTP",
                "flow=Background-UDP-Established",
                "flow=Somebody-Renamed-This"):
        print(f"  {raw:40s} -> {classify_label(raw).token}")

    print()
    print("=== a file with one mangled row ===")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "capture.binetflow"
        lines = ["StartTime,Dur,Proto,SrcAddr,Sport,Dir,DstAddr,Dport,State,"
                 "sTos,dTos,TotPkts,TotBytes,SrcBytes,Label"]
        lines.extend(ROWS)
        lines.append("not,a,flow,row")
        path.write_text("\n".join(lines) + "\n")

        flows, stats = read_flows(str(path), on_error="skip")
        print(f"rows seen {stats.total_rows}, parsed {stats.parsed}, "
              f"skipped {stats.skipped}")
        dist = label_distribution(flows)
        for token, count in sorted(dist.counts.items()):
            print(f"  {token:12s} {count:3d}  ({dist.percentages[token]:.1f}%)")

    print()
    print("=== records render back to the wire format ===")
    print(render_line(parse_line(ROWS[0], line_no=1)))


if __name__ == "__main__":
    main()
