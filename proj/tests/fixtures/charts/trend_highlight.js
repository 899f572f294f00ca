// closing price with upward runs of 5+ days highlighted
const margin = { top: 20, right: 30, bottom: 30, left: 50 };
const series = data.filter(d => d.Close !== null).map(d => ({ date: new Date(d.Date), close: d.Close }));
const runs = [];
let start = 0;
for (let i = 1; i <= series.length; i++) {
  const rising = i < series.length && series[i].close > series[i - 1].close;
  if (!rising) {
    if (i - start >= 5) runs.push({ from: series[start].date, to: series[i - 1].date, gain: series[i - 1].close - series[start].close });
    start = i;
  }
}

const xScale = d3.scaleTime().domain(d3.extent(series, d => d.date)).range([margin.left, vw - margin.right]);
const yScale = d3.scaleLinear().domain([0, d3.max(series, d => d.close)]).nice().range([vh - margin.bottom, margin.top]);

svg.selectAll("rect.run")
  .data(runs)
  .enter()
  .append("rect")
  .attr("class", "run")
  .attr("x", r => xScale(r.from))
  .attr("width", r => Math.max(1, xScale(r.to) - xScale(r.from)))
  .attr("y", margin.top)
  .attr("height", vh - margin.top - margin.bottom)
  .attr("fill", "#fdd49e")
  .attr("opacity", 0.6);

svg.append("path").datum(series).attr("fill", "none").attr("stroke", "#1f77b4")
  .attr("d", d3.line().x(d => xScale(d.date)).y(d => yScale(d.close)));
svg.append("g").attr("transform", `translate(0,${vh - margin.bottom})`).call(d3.axisBottom(xScale));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(yScale));
return { xScale, yScale };
