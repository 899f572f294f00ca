const margin = { top: 10, right: 20, bottom: 30, left: 40 };
const values = data.map(d => d.Usage_kWh).filter(v => v !== null);
const xScale = d3.scaleLinear().domain(d3.extent(values)).nice().range([margin.left, vw - margin.right]);
const bins = d3.bin().domain(xScale.domain()).thresholds(xScale.ticks(30))(values);
const yScale = d3.scaleLinear().domain([0, d3.max(bins, b => b.length)]).nice().range([vh - margin.bottom, margin.top]);

svg.append("g")
  .attr("fill", "#69b3a2")
  .selectAll("rect")
  .data(bins)
  .enter()
  .append("rect")
  .attr("x", b => xScale(b.x0) + 1)
  .attr("width", b => Math.max(0, xScale(b.x1) - xScale(b.x0) - 1))
  .attr("y", b => yScale(b.length))
  .attr("height", b => yScale(0) - yScale(b.length));

svg.append("g").attr("transform", `translate(0,${vh - margin.bottom})`).call(d3.axisBottom(xScale));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(yScale));
return { xScale, yScale };
