// share of readings per load type
const radius = Math.min(vw, vh) / 2 - 10;
const counts = d3.rollups(data, v => v.length, d => d.Load_Type).map(([type, n]) => ({ type, n }));
const pie = d3.pie().value(d => d.n).sort(null);
const arc = d3.arc().innerRadius(0).outerRadius(radius);
const color = d3.scaleOrdinal().domain(counts.map(d => d.type)).range(d3.schemeSet2);

const g = svg.append("g").attr("transform", `translate(${vw / 2},${vh / 2})`);
g.selectAll("path")
  .data(pie(counts))
  .enter()
  .append("path")
  .attr("d", arc)
  .attr("fill", d => color(d.data.type))
  .attr("stroke", "white");

g.selectAll("text")
  .data(pie(counts))
  .enter()
  .append("text")
  .attr("transform", d => `translate(${arc.centroid(d)})`)
  .attr("text-anchor", "middle")
  .text(d => d.data.type);

// pies have no positional axes; identity scales keep the contract
const xScale = d3.scaleLinear().domain([0, vw]).range([0, vw]);
const yScale = d3.scaleLinear().domain([0, vh]).range([0, vh]);
return { xScale, yScale };
